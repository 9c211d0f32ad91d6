#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "ists/error.hpp"

namespace ists::cli {

namespace {

constexpr int kLeft = 60;
constexpr int kRight = 20;
constexpr int kTop = 40;
constexpr int kBottom = 90;
constexpr int kPlotHeight = 300;

const cv::Scalar kPalette[] = {{180, 119, 31}, {14, 127, 255}, {44, 160, 44},  {40, 39, 214},
                               {189, 103, 148}, {75, 86, 140}, {194, 119, 227}, {127, 127, 127}};

cv::Scalar colour(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

void text(cv::Mat& img, const std::string& s, cv::Point at, double scale = 0.4) {
    cv::putText(img, s, at, cv::FONT_HERSHEY_SIMPLEX, scale, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
}

int y_of(double v) { return kTop + static_cast<int>(std::lround((1.0 - std::clamp(v, 0.0, 1.0)) * kPlotHeight)); }

void axes(cv::Mat& img, int width, const std::string& title) {
    text(img, title, {kLeft, 22}, 0.55);
    cv::line(img, {kLeft, kTop}, {kLeft, kTop + kPlotHeight}, cv::Scalar(0, 0, 0));
    cv::line(img, {kLeft, kTop + kPlotHeight}, {width - kRight, kTop + kPlotHeight}, cv::Scalar(0, 0, 0));
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        cv::line(img, {kLeft - 4, y_of(v)}, {width - kRight, y_of(v)}, cv::Scalar(220, 220, 220));
        char buf[8];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        text(img, buf, {12, y_of(v) + 4});
    }
}

void legend(cv::Mat& img, const std::vector<std::string>& names) {
    int x = kLeft;
    const int y = kTop + kPlotHeight + 70;
    for (std::size_t i = 0; i < names.size(); ++i) {
        cv::rectangle(img, {x, y - 9}, {x + 10, y + 1}, colour(i), cv::FILLED);
        text(img, names[i], {x + 14, y});
        x += 24 + static_cast<int>(names[i].size()) * 7;
    }
}

void save(const std::filesystem::path& path, const cv::Mat& img) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), img)) throw Error(ErrorCode::Io, "cannot write plot '" + path.string() + "'");
}

}  // namespace

void plot_bars(const std::filesystem::path& path, const std::string& title, const std::vector<std::string>& series,
               const std::vector<BarGroup>& groups) {
    require(!groups.empty() && !series.empty(), "bar plot needs data");
    const int bar = 12;
    const int group_width = static_cast<int>(series.size()) * bar + 16;
    const int width = std::max(420, kLeft + kRight + static_cast<int>(groups.size()) * group_width);
    cv::Mat img(kTop + kPlotHeight + kBottom, width, CV_8UC3, cv::Scalar(255, 255, 255));
    axes(img, width, title);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const int x0 = kLeft + 8 + static_cast<int>(g) * group_width;
        for (std::size_t s = 0; s < groups[g].values.size() && s < series.size(); ++s) {
            const double v = groups[g].values[s];
            if (!std::isfinite(v)) continue;
            const int x = x0 + static_cast<int>(s) * bar;
            cv::rectangle(img, {x, y_of(v)}, {x + bar - 2, y_of(0.0)}, colour(s), cv::FILLED);
        }
        text(img, groups[g].label, {x0, kTop + kPlotHeight + 16}, 0.35);
    }
    legend(img, series);
    save(path, img);
}

void plot_curves(const std::filesystem::path& path, const std::string& title, const std::vector<std::string>& x_labels,
                 const std::vector<Curve>& curves) {
    require(!x_labels.empty() && !curves.empty(), "curve plot needs data");
    const int width = std::max(420, kLeft + kRight + static_cast<int>(x_labels.size()) * 70);
    cv::Mat img(kTop + kPlotHeight + kBottom, width, CV_8UC3, cv::Scalar(255, 255, 255));
    axes(img, width, title);
    const double step = static_cast<double>(width - kLeft - kRight - 40) / std::max<std::size_t>(1, x_labels.size() - 1);
    auto x_of = [&](std::size_t i) { return kLeft + 20 + static_cast<int>(std::lround(step * static_cast<double>(i))); };
    for (std::size_t i = 0; i < x_labels.size(); ++i) text(img, x_labels[i], {x_of(i) - 18, kTop + kPlotHeight + 16}, 0.35);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        names.push_back(curves[c].label);
        for (std::size_t i = 0; i < curves[c].y.size() && i < x_labels.size(); ++i) {
            const cv::Point p(x_of(i), y_of(curves[c].y[i]));
            cv::circle(img, p, 3, colour(c), cv::FILLED, cv::LINE_AA);
            if (i > 0) cv::line(img, {x_of(i - 1), y_of(curves[c].y[i - 1])}, p, colour(c), 2, cv::LINE_AA);
        }
    }
    legend(img, names);
    save(path, img);
}

}  // namespace ists::cli

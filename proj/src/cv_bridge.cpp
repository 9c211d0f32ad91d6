#include "cv_bridge.hpp"

#include <algorithm>
#include <cmath>

namespace ists::detail {

cv::Mat to_mat(const Image& image) {
    require(image.channels() == 3, "image must have 3 channels");
    cv::Mat mat(image.height(), image.width(), CV_64FC3);
    for (int y = 0; y < image.height(); ++y) {
        auto* row = mat.ptr<cv::Vec3d>(y);
        for (int x = 0; x < image.width(); ++x)
            row[x] = cv::Vec3d(image(2, y, x), image(1, y, x), image(0, y, x));
    }
    return mat;
}

Image from_mat(const cv::Mat& mat) {
    require(mat.type() == CV_64FC3, "expected a 3-channel double matrix");
    Image image(3, mat.rows, mat.cols);
    for (int y = 0; y < mat.rows; ++y) {
        const auto* row = mat.ptr<cv::Vec3d>(y);
        for (int x = 0; x < mat.cols; ++x) {
            image(0, y, x) = row[x][2];
            image(1, y, x) = row[x][1];
            image(2, y, x) = row[x][0];
        }
    }
    return image;
}

cv::Mat to_mat8(const Image& image) {
    require(image.channels() == 3, "image must have 3 channels");
    cv::Mat mat(image.height(), image.width(), CV_8UC3);
    auto level = [](double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    for (int y = 0; y < image.height(); ++y) {
        auto* row = mat.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x)
            row[x] = cv::Vec3b(level(image(2, y, x)), level(image(1, y, x)), level(image(0, y, x)));
    }
    return mat;
}

Image from_mat8(const cv::Mat& mat) {
    require(mat.type() == CV_8UC3, "expected an 8-bit 3-channel matrix");
    Image image(3, mat.rows, mat.cols);
    for (int y = 0; y < mat.rows; ++y) {
        const auto* row = mat.ptr<cv::Vec3b>(y);
        for (int x = 0; x < mat.cols; ++x) {
            image(0, y, x) = row[x][2] / 255.0;
            image(1, y, x) = row[x][1] / 255.0;
            image(2, y, x) = row[x][0] / 255.0;
        }
    }
    return image;
}

}  // namespace ists::detail

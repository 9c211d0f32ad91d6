#include "ists/distortion.hpp"

#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <sstream>

#include "cv_bridge.hpp"
#include "ists/codec.hpp"
#include "ists/random.hpp"

namespace ists {

std::string to_string(DistortionKind kind) {
    switch (kind) {
    case DistortionKind::Rotation: return "rotation";
    case DistortionKind::Noise: return "noise";
    case DistortionKind::Blur: return "blur";
    case DistortionKind::Crop: return "crop";
    case DistortionKind::Jpeg: return "jpeg";
    }
    return "unknown";
}

DistortionKind distortion_kind_from_string(const std::string& name) {
    for (DistortionKind k : all_distortions())
        if (to_string(k) == name) return k;
    throw_argument("unknown distortion kind '" + name + "'");
}

const std::vector<DistortionKind>& all_distortions() {
    static const std::vector<DistortionKind> kinds{DistortionKind::Rotation, DistortionKind::Noise,
                                                   DistortionKind::Blur, DistortionKind::Crop, DistortionKind::Jpeg};
    return kinds;
}

DistortionSpec DistortionSpec::standard(DistortionKind kind) {
    switch (kind) {
    case DistortionKind::Rotation: return {kind, 75.0};
    case DistortionKind::Noise: return {kind, 0.1};
    case DistortionKind::Blur: return {kind, 8.0};
    case DistortionKind::Crop: return {kind, 0.75};
    case DistortionKind::Jpeg: return {kind, 25.0};
    }
    throw_argument("unknown distortion kind");
}

void DistortionSpec::validate() const {
    require(std::isfinite(magnitude), "distortion magnitude must be finite");
    switch (kind) {
    case DistortionKind::Rotation: break;
    case DistortionKind::Noise: require(magnitude >= 0.0, "noise sigma must be non-negative"); break;
    case DistortionKind::Blur:
        require(magnitude >= 1.0 && magnitude == std::floor(magnitude), "blur support must be a positive integer");
        break;
    case DistortionKind::Crop: require(magnitude > 0.0 && magnitude <= 1.0, "crop fraction must lie in (0, 1]"); break;
    case DistortionKind::Jpeg:
        require(magnitude >= 0.0 && magnitude <= 100.0 && magnitude == std::floor(magnitude),
                "jpeg quality must be an integer in [0, 100]");
        break;
    }
}

std::string DistortionSpec::label() const {
    std::ostringstream out;
    out << to_string(kind) << ':' << magnitude;
    if (kind == DistortionKind::Crop && crop_measure == CropMeasure::Side) out << ":side";
    return out.str();
}

namespace {

Image rotate(const Image& image, double degrees) {
    const cv::Mat src = detail::to_mat(image);
    const cv::Point2f centre(static_cast<float>((image.width() - 1) / 2.0),
                             static_cast<float>((image.height() - 1) / 2.0));
    const cv::Mat rot = cv::getRotationMatrix2D(centre, degrees, 1.0);
    cv::Mat dst;
    cv::warpAffine(src, dst, rot, src.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar::all(0));
    return detail::from_mat(dst);
}

Image add_noise(const Image& image, double sigma, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "distortion:noise"));
    Image out = image;
    for (double& v : out.values()) v += sigma * rng.normal();
    return out;
}

Image blur(const Image& image, int support) {
    const double sigma = support / 6.0;
    cv::Mat kernel(support, 1, CV_64F);
    double total = 0.0;
    for (int i = 0; i < support; ++i) {
        const double u = i - (support - 1) / 2.0;
        total += kernel.at<double>(i) = std::exp(-u * u / (2.0 * sigma * sigma));
    }
    kernel /= total;
    cv::Mat dst;
    cv::sepFilter2D(detail::to_mat(image), dst, -1, kernel, kernel, cv::Point(-1, -1), 0.0, cv::BORDER_REFLECT_101);
    return detail::from_mat(dst);
}

Image crop(const Image& image, double fraction, CropMeasure measure, std::uint64_t seed) {
    const double side = measure == CropMeasure::Area ? std::sqrt(fraction) : fraction;
    const int ch = std::max(1, static_cast<int>(std::lround(side * image.height())));
    const int cw = std::max(1, static_cast<int>(std::lround(side * image.width())));
    Rng rng(derive_seed(seed, "distortion:crop"));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(image.height() - ch + 1)));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(image.width() - cw + 1)));
    const cv::Mat src = detail::to_mat(image);
    cv::Mat dst;
    cv::resize(src(cv::Rect(x0, y0, cw, ch)), dst, src.size(), 0, 0, cv::INTER_LINEAR);
    return detail::from_mat(dst);
}

Image jpeg(const Image& image, int quality) {
    std::vector<unsigned char> buffer;
    if (!cv::imencode(".jpg", detail::to_mat8(image), buffer, {cv::IMWRITE_JPEG_QUALITY, quality}))
        throw Error(ErrorCode::Io, "jpeg encoding failed");
    const cv::Mat decoded = cv::imdecode(buffer, cv::IMREAD_COLOR);
    if (decoded.empty()) throw Error(ErrorCode::Format, "jpeg decoding failed");
    return detail::from_mat8(decoded);
}

}  // namespace

Image distort(const Image& image, const DistortionSpec& spec, std::uint64_t seed) {
    spec.validate();
    require(image.channels() == 3, "distortions need a 3-channel image");
    switch (spec.kind) {
    case DistortionKind::Rotation: return quantize8(rotate(image, spec.magnitude));
    case DistortionKind::Noise: return quantize8(add_noise(image, spec.magnitude, seed));
    case DistortionKind::Blur: return quantize8(blur(image, static_cast<int>(spec.magnitude)));
    case DistortionKind::Crop: return quantize8(crop(image, spec.magnitude, spec.crop_measure, seed));
    case DistortionKind::Jpeg: return jpeg(image, static_cast<int>(spec.magnitude));
    }
    throw_argument("unknown distortion kind");
}

}  // namespace ists

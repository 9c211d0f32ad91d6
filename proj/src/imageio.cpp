#include "ists/imageio.hpp"

#include <opencv2/imgcodecs.hpp>

#include "cv_bridge.hpp"

namespace ists {

void write_png(const std::filesystem::path& path, const Image& image) {
    const cv::Mat mat = detail::to_mat8(image);
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat, {cv::IMWRITE_PNG_COMPRESSION, 6});
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "': " + e.what());
    }
    if (!ok) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
}

Image read_png(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "no such file '" + path.string() + "'");
    const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw Error(ErrorCode::Format, "'" + path.string() + "' is not a readable image");
    if (mat.type() != CV_8UC3)
        throw Error(ErrorCode::Format, "'" + path.string() + "' is not an 8-bit RGB image");
    return detail::from_mat8(mat);
}

}  // namespace ists

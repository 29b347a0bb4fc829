#pragma once

#include <filesystem>
#include <string>

#include "image.hpp"
#include "rng.hpp"

namespace testsupport {

// Unique scratch directory under the build tree, wiped on construction.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = (std::filesystem::temp_directory_path() / ("pogest_test_" + name)).string();
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }

    const std::string& path() const { return path_; }
    std::string file(const std::string& rel) const {
        return (std::filesystem::path(path_) / rel).string();
    }

private:
    std::string path_;
};

inline pogest::ImageU8 random_rgb(int w, int h, pogest::Rng& rng) {
    pogest::ImageU8 img = pogest::ImageU8::make(w, h, 3);
    for (auto& p : img.px) p = static_cast<uint8_t>(rng.uniform_int(256));
    return img;
}

} // namespace testsupport

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ipts::media {

struct WavData {
    uint32_t sample_rate = 8000;
    std::vector<int16_t> samples;  // mono PCM16
};

bool write_wav(const std::string& path, const std::vector<int16_t>& samples,
               uint32_t sample_rate = 8000);
std::optional<WavData> read_wav(const std::string& path);

}  // namespace ipts::media

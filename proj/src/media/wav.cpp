#include "ipts/media/wav.hpp"

#include <cstring>
#include <fstream>

namespace ipts::media {

namespace {

void put_u32(std::string& s, uint32_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
    s.push_back(static_cast<char>((v >> 16) & 0xFF));
    s.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& s, uint16_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

uint32_t get_u32(const std::string& s, size_t at) {
    return static_cast<uint8_t>(s[at]) | (static_cast<uint8_t>(s[at + 1]) << 8) |
           (static_cast<uint8_t>(s[at + 2]) << 16) |
           (static_cast<uint32_t>(static_cast<uint8_t>(s[at + 3])) << 24);
}

uint16_t get_u16(const std::string& s, size_t at) {
    return static_cast<uint16_t>(static_cast<uint8_t>(s[at]) |
                                 (static_cast<uint8_t>(s[at + 1]) << 8));
}

}  // namespace

bool write_wav(const std::string& path, const std::vector<int16_t>& samples,
               uint32_t sample_rate) {
    std::string out;
    uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, sample_rate);
    put_u32(out, sample_rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (int16_t s : samples) put_u16(out, static_cast<uint16_t>(s));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    return f.good();
}

std::optional<WavData> read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return std::nullopt;
    std::string raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (raw.size() < 44 || raw.compare(0, 4, "RIFF") != 0 || raw.compare(8, 4, "WAVE") != 0)
        return std::nullopt;

    WavData wav;
    bool have_fmt = false;
    size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        std::string id = raw.substr(pos, 4);
        uint32_t len = get_u32(raw, pos + 4);
        size_t body = pos + 8;
        if (body + len > raw.size()) return std::nullopt;
        if (id == "fmt ") {
            if (len < 16) return std::nullopt;
            if (get_u16(raw, body) != 1) return std::nullopt;       // PCM only
            if (get_u16(raw, body + 2) != 1) return std::nullopt;   // mono only
            wav.sample_rate = get_u32(raw, body + 4);
            if (get_u16(raw, body + 14) != 16) return std::nullopt; // 16-bit only
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) return std::nullopt;
            wav.samples.reserve(len / 2);
            for (size_t i = 0; i + 1 < len; i += 2)
                wav.samples.push_back(static_cast<int16_t>(get_u16(raw, body + i)));
            return wav;
        }
        pos = body + len + (len % 2);
    }
    return std::nullopt;
}

}  // namespace ipts::media

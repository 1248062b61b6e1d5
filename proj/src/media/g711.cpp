#include "ipts/media/g711.hpp"

namespace ipts::media {

namespace {
constexpr int kBias = 0x84;
constexpr int kClip = 32635;
}  // namespace

uint8_t pcmu_encode(int16_t sample) {
    int value = sample;
    int sign = (value < 0) ? 0x80 : 0;
    if (sign) value = -value;
    if (value > kClip) value = kClip;
    value += kBias;

    int exponent = 7;
    for (int mask = 0x4000; (value & mask) == 0 && exponent > 0; mask >>= 1) --exponent;
    int mantissa = (value >> (exponent + 3)) & 0x0F;
    return static_cast<uint8_t>(~(sign | (exponent << 4) | mantissa));
}

int16_t pcmu_decode(uint8_t byte) {
    int value = ~byte & 0xFF;
    int sign = value & 0x80;
    int exponent = (value >> 4) & 0x07;
    int mantissa = value & 0x0F;
    int magnitude = (((mantissa << 3) + kBias) << exponent) - kBias;
    return static_cast<int16_t>(sign ? -magnitude : magnitude);
}

}  // namespace ipts::media

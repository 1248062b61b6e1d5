#pragma once

#include <cstdint>

namespace ipts::media {

// G.711 mu-law. Encode clips to the 14-bit companding range.
uint8_t pcmu_encode(int16_t sample);
int16_t pcmu_decode(uint8_t byte);

}  // namespace ipts::media

#pragma once

#include <cstdint>
#include <vector>

namespace ipts::media {

constexpr int kSampleRate = 8000;
constexpr int kFrameMs = 20;
constexpr int kFrameSamples = kSampleRate * kFrameMs / 1000;  // 160

using Frame = std::vector<int16_t>;  // always kFrameSamples long

Frame silence_frame();

// Continuous sine generator; phase carries across frames.
class ToneSource {
public:
    explicit ToneSource(double freq_hz, int16_t amplitude = 8000)
        : freq_(freq_hz), amplitude_(amplitude) {}
    Frame next_frame();
    double frequency() const { return freq_; }

private:
    double freq_;
    int16_t amplitude_;
    double phase_ = 0;
};

// Sample-wise sum with saturation at the int16 rails.
Frame mix_frames(const std::vector<Frame>& inputs);
int16_t saturating_add(int16_t a, int16_t b);

// Single-bin DFT power, normalized by window length. Loud at `freq` when the
// signal contains that tone.
double goertzel_power(const std::vector<int16_t>& samples, double freq_hz,
                      int sample_rate = kSampleRate);

// True when `freq` dominates the spectrum of the window.
bool tone_present(const std::vector<int16_t>& samples, double freq_hz,
                  int sample_rate = kSampleRate);

}  // namespace ipts::media

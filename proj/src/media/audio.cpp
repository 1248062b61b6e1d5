#include "ipts/media/audio.hpp"

#include <cmath>

namespace ipts::media {

Frame silence_frame() { return Frame(kFrameSamples, 0); }

Frame ToneSource::next_frame() {
    Frame f(kFrameSamples);
    double step = 2.0 * M_PI * freq_ / kSampleRate;
    for (int i = 0; i < kFrameSamples; ++i) {
        f[i] = static_cast<int16_t>(amplitude_ * std::sin(phase_));
        phase_ += step;
        if (phase_ > 2.0 * M_PI) phase_ -= 2.0 * M_PI;
    }
    return f;
}

int16_t saturating_add(int16_t a, int16_t b) {
    int sum = int(a) + int(b);
    if (sum > 32767) return 32767;
    if (sum < -32768) return -32768;
    return static_cast<int16_t>(sum);
}

Frame mix_frames(const std::vector<Frame>& inputs) {
    // wide accumulate, clamp once: the result must not depend on input order
    std::vector<int32_t> acc(kFrameSamples, 0);
    for (const auto& in : inputs)
        for (int i = 0; i < kFrameSamples && i < static_cast<int>(in.size()); ++i)
            acc[i] += in[i];
    Frame out(kFrameSamples);
    for (int i = 0; i < kFrameSamples; ++i) {
        int32_t v = acc[i];
        out[i] = static_cast<int16_t>(v > 32767 ? 32767 : (v < -32768 ? -32768 : v));
    }
    return out;
}

double goertzel_power(const std::vector<int16_t>& samples, double freq_hz, int sample_rate) {
    if (samples.empty()) return 0;
    size_t n = samples.size();
    double k = 0.5 + n * freq_hz / sample_rate;
    double w = 2.0 * M_PI * std::floor(k) / n;
    double coeff = 2.0 * std::cos(w);
    double s0 = 0, s1 = 0, s2 = 0;
    for (int16_t x : samples) {
        s0 = x + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    double power = s1 * s1 + s2 * s2 - coeff * s1 * s2;
    return power / (double(n) * double(n));
}

bool tone_present(const std::vector<int16_t>& samples, double freq_hz, int sample_rate) {
    double at = goertzel_power(samples, freq_hz, sample_rate);
    // compare against off-frequency bins; a real tone towers over them
    double off1 = goertzel_power(samples, freq_hz * 1.5 + 70, sample_rate);
    double off2 = goertzel_power(samples, freq_hz * 0.5 + 90, sample_rate);
    double floor_power = std::max(off1, off2) + 1.0;
    return at > 1000.0 && at > 20.0 * floor_power;
}

}  // namespace ipts::media

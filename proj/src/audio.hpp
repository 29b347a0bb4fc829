#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pogest {

struct AudioClip {
    int sample_rate = 0;
    std::vector<double> samples; // mono, [-1,1]
};

// Mono PCM16 WAV.
AudioClip load_wav(const std::string& path);
void save_wav(const std::string& path, const AudioClip& clip);

struct TimeShift {
    long shift = 0;          // samples by which b lags a
    double confidence = 0.0; // peak correlation over second non-adjacent peak
    bool low_confidence = false;
};

// Argmax of the normalized cross-correlation over lags within +/- max_lag
// (defaults to 60 s or the signal length). Silent inputs are rejected;
// ambiguous correlation surfaces (periodic tones) set the low-confidence
// flag. Antisymmetric: shifting roles negates the shift.
TimeShift estimate_time_shift(const AudioClip& a, const AudioClip& b, long max_lag = 0,
                              double confidence_threshold = 1.25);

} // namespace pogest

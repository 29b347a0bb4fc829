#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace pogest {

namespace {

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::ofstream& out, uint32_t v) {
    uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                    static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
}
void write_u16(std::ofstream& out, uint16_t v) {
    uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
}

} // namespace

AudioClip load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) Error::io("cannot open audio file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    require_valid(bytes.size() >= 44 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
                      std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
                  "audio: not a RIFF/WAVE file: " + path);

    AudioClip clip;
    int bits = 0, channels = 0;
    bool have_fmt = false, have_data = false;
    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t len = read_u32(bytes.data() + pos + 4);
        const size_t body = pos + 8;
        if (body + len > bytes.size()) break;
        if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
            const uint16_t format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            clip.sample_rate = static_cast<int>(read_u32(bytes.data() + body + 4));
            bits = read_u16(bytes.data() + body + 14);
            require_valid(format == 1, "audio: only PCM WAV is supported: " + path);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            require_valid(have_fmt, "audio: data chunk before fmt chunk: " + path);
            require_valid(channels == 1, "audio: only mono WAV is supported: " + path);
            require_valid(bits == 16, "audio: only 16-bit PCM is supported: " + path);
            const size_t n = len / 2;
            clip.samples.resize(n);
            for (size_t i = 0; i < n; ++i) {
                const int16_t s = static_cast<int16_t>(read_u16(bytes.data() + body + 2 * i));
                clip.samples[i] = s / 32768.0;
            }
            have_data = true;
        }
        pos = body + len + (len & 1);
    }
    require_valid(have_data, "audio: missing data chunk: " + path);
    return clip;
}

void save_wav(const std::string& path, const AudioClip& clip) {
    require_valid(clip.sample_rate > 0, "audio: sample rate must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) Error::io("cannot write audio file: " + path);
    const uint32_t data_len = static_cast<uint32_t>(clip.samples.size() * 2);
    out.write("RIFF", 4);
    write_u32(out, 36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1); // PCM
    write_u16(out, 1); // mono
    write_u32(out, static_cast<uint32_t>(clip.sample_rate));
    write_u32(out, static_cast<uint32_t>(clip.sample_rate * 2)); // byte rate
    write_u16(out, 2);                                           // block align
    write_u16(out, 16);                                          // bits
    out.write("data", 4);
    write_u32(out, data_len);
    for (double v : clip.samples) {
        const double clamped = std::clamp(v, -1.0, 1.0);
        const int16_t s = static_cast<int16_t>(std::lround(clamped * 32767.0));
        write_u16(out, static_cast<uint16_t>(s));
    }
}

TimeShift estimate_time_shift(const AudioClip& a, const AudioClip& b, long max_lag,
                              double confidence_threshold) {
    require_valid(a.sample_rate == b.sample_rate, "time shift: sample rates differ");
    require_valid(a.sample_rate > 0, "time shift: invalid sample rate");
    require_valid(!a.samples.empty() && !b.samples.empty(), "time shift: empty signal");

    auto rms = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s / static_cast<double>(v.size()));
    };
    require_valid(rms(a.samples) > 1e-9 && rms(b.samples) > 1e-9, "time shift: silent input");

    const long na = static_cast<long>(a.samples.size());
    const long nb = static_cast<long>(b.samples.size());
    if (max_lag <= 0) max_lag = 60L * a.sample_rate;
    max_lag = std::min(max_lag, std::max(na, nb) - 1);

    // Prefix sums of squared samples for the per-lag normalization.
    std::vector<double> pa(na + 1, 0.0), pb(nb + 1, 0.0);
    for (long i = 0; i < na; ++i) pa[i + 1] = pa[i] + a.samples[i] * a.samples[i];
    for (long i = 0; i < nb; ++i) pb[i + 1] = pb[i] + b.samples[i] * b.samples[i];

    std::vector<double> corr(2 * max_lag + 1, 0.0);
    for (long k = -max_lag; k <= max_lag; ++k) {
        const long t0 = std::max(0L, -k);
        const long t1 = std::min(na - 1, nb - 1 - k);
        if (t1 < t0) continue;
        double dot = 0.0;
        for (long t = t0; t <= t1; ++t) dot += a.samples[t] * b.samples[t + k];
        const double ea = pa[t1 + 1] - pa[t0];
        const double eb = pb[t1 + k + 1] - pb[t0 + k];
        const double denom = std::sqrt(ea * eb);
        corr[k + max_lag] = denom > 0.0 ? dot / denom : 0.0;
    }

    long best_k = 0;
    double best_r = -2.0;
    for (long k = -max_lag; k <= max_lag; ++k) {
        const double r = corr[k + max_lag];
        if (r > best_r || (r == best_r && (std::labs(k) < std::labs(best_k) ||
                                           (std::labs(k) == std::labs(best_k) && k < best_k)))) {
            best_r = r;
            best_k = k;
        }
    }

    const long exclusion = std::max(1L, static_cast<long>(a.sample_rate / 100));
    double second = -2.0;
    for (long k = -max_lag; k <= max_lag; ++k) {
        if (std::labs(k - best_k) <= exclusion) continue;
        second = std::max(second, corr[k + max_lag]);
    }

    TimeShift out;
    out.shift = best_k;
    out.confidence = (second > 1e-12) ? best_r / second : best_r / 1e-12;
    out.low_confidence = out.confidence < confidence_threshold;
    return out;
}

} // namespace pogest

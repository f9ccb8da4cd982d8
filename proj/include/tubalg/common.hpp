#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace tubalg {

using Complex = std::complex<double>;

// Shape/argument mismatches detectable before any computation.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// File-level failures; message names the byte offset for malformed binaries.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Transform matrix rejected: condition estimate above the 1e12 threshold.
struct NotInvertibleError : std::invalid_argument {
    explicit NotInvertibleError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation requires a real tubal ring but the transform's rows are neither
// real nor conjugate-paired within tolerance.
struct NotRealRingError : std::invalid_argument {
    explicit NotRealRingError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Multirank vector not constant across a conjugate-pair group.
struct InvalidMultirankError : std::invalid_argument {
    explicit InvalidMultirankError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested witness construction does not apply to this transform.
struct NotApplicableError : std::invalid_argument {
    explicit NotApplicableError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A result that is provably real came back with a large imaginary residue.
struct InternalConsistencyError : std::runtime_error {
    explicit InternalConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic random source. Distributions are hand-rolled on top of
// mt19937_64 so that streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed)), seq_(seed) { warmup(); }

    // Independent stream fully determined by (seed, index).
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix(seed ^ (0x9e3779b97f4a7c15ull + splitmix(index + 1))));
    }

    std::uint64_t bits() {
        // xorshift* step
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(bits() % span);
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    Complex cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    std::uint64_t sequence_seed() const { return seq_; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }
    void warmup() {
        if (state_ == 0) state_ = 0x6a09e667f3bcc909ull;
        for (int i = 0; i < 4; ++i) bits();
    }

    std::uint64_t state_;
    std::uint64_t seq_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Runs fn(i) for i in [0, count). Honors the TUBALG_THREADS env var; work is
// split into contiguous blocks so results are deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Max worker count currently in effect (>= 1).
int thread_budget();

}  // namespace tubalg

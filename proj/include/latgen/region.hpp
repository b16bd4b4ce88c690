// include/latgen/region.hpp: half-open linear cells over Z^n.
//
// A LinearRegion is { z in Z^n : 0 <= (T (z - offset))_i < D for all i } with
// T an integer matrix and D > 0, together with an integer bounding box. Both
// a parallelepiped {V a + t : a in [0,1)^n} and the coordinate preimage of a
// window, {a : M a in [0,B)^n}, take this form after clearing denominators.

#pragma once

#include "latgen/exactmat.hpp"
#include "latgen/numeric.hpp"
#include "latgen/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latgen {

struct GuardExceeded : std::runtime_error {
    GuardExceeded(const std::string& what, double predicted)
        : std::runtime_error(what + " (predicted " + std::to_string(predicted) + ")"), predicted(predicted) {}
    double predicted;
};

struct SamplerError : std::runtime_error {
    SamplerError(std::uint64_t attempts, double expected_acceptance)
        : std::runtime_error("rejection sampler exhausted " + std::to_string(attempts) +
                             " draws; expected acceptance " + std::to_string(expected_acceptance)),
          attempts(attempts), expected_acceptance(expected_acceptance) {}
    std::uint64_t attempts;
    double expected_acceptance;
};

class LinearRegion {
  public:
    LinearRegion(ExactMatrix T, IntVector offset, Integer D, IntVector box_lo, IntVector box_hi)
        : n_(T.rows()), T_(std::move(T)), offset_(std::move(offset)), D_(std::move(D)), lo_(std::move(box_lo)),
          hi_(std::move(box_hi)) {
        if (!T_.square() || offset_.size() != n_ || lo_.size() != n_ || hi_.size() != n_)
            throw std::invalid_argument("LinearRegion: shape mismatch");
        if (sgn(D_) <= 0) throw std::invalid_argument("LinearRegion: bound must be positive");
        for (std::size_t i = 0; i < n_; ++i)
            if (hi_[i] < lo_[i]) throw std::invalid_argument("LinearRegion: empty bounding box");
        prepare_fast_path();
    }

    std::size_t dim() const noexcept { return n_; }
    const IntVector& box_lo() const noexcept { return lo_; }
    const IntVector& box_hi() const noexcept { return hi_; }
    const ExactMatrix& transform() const noexcept { return T_; }
    const Integer& bound() const noexcept { return D_; }
    bool has_fast_path() const noexcept { return fast_; }

    // Number of integer points in the bounding box.
    Integer box_volume() const {
        Integer v = 1;
        for (std::size_t i = 0; i < n_; ++i) v *= hi_[i] - lo_[i] + 1;
        return v;
    }

    bool contains(std::span<const Integer> z) const {
        for (std::size_t i = 0; i < n_; ++i) {
            Integer acc = 0;
            for (std::size_t j = 0; j < n_; ++j) acc += T_(i, j) * (z[j] - offset_[j]);
            if (sgn(acc) < 0 || acc >= D_) return false;
        }
        return true;
    }

    // Same test on 128-bit coordinates; requires has_fast_path() and z inside the box.
    bool contains_fast(std::span<const int128> z) const {
        for (std::size_t i = 0; i < n_; ++i) {
            int128 acc = 0;
            const int128* row = &T128_[i * n_];
            for (std::size_t j = 0; j < n_; ++j) acc += row[j] * (z[j] - off128_[j]);
            if (acc < 0 || acc >= D128_) return false;
        }
        return true;
    }

    // Uniform point of the region by rejection from the bounding box. Writes the
    // point to `out`; returns the number of draws used.
    std::uint64_t sample_fast(RngStream& rng, std::span<int128> out, std::uint64_t max_draws) const {
        for (std::uint64_t draw = 1; draw <= max_draws; ++draw) {
            for (std::size_t i = 0; i < n_; ++i) out[i] = rng.uniform_in(lo64_[i], hi64_[i]);
            if (contains_fast(out)) return draw;
        }
        throw SamplerError(max_draws, expected_acceptance());
    }

    std::uint64_t sample(RngStream& rng, IntVector& out, std::uint64_t max_draws) const {
        out.resize(n_);
        if (fast_) {
            std::vector<int128> buf(n_);
            const auto used = sample_fast(rng, buf, max_draws);
            for (std::size_t i = 0; i < n_; ++i) out[i] = to_integer(buf[i]);
            return used;
        }
        for (std::uint64_t draw = 1; draw <= max_draws; ++draw) {
            for (std::size_t i = 0; i < n_; ++i) out[i] = rng.uniform_in(lo_[i], hi_[i]);
            if (contains(out)) return draw;
        }
        throw SamplerError(max_draws, expected_acceptance());
    }

    // Lattice volume of the region divided by the box point count (D^n / |det T|
    // over the box). Diagnostic only.
    double expected_acceptance() const {
        const Integer d = abs(det(T_));
        if (sgn(d) == 0) return 0.0;
        const Rational vol = Rational(pow_int(D_, static_cast<unsigned long>(n_)), d);
        return Rational(vol / box_volume()).get_d();
    }

    // Visits every member in lexicographic order of coordinates.
    template <class F>
    void for_each_point(F&& visit) const {
        IntVector z = lo_;
        for (;;) {
            if (contains(z)) visit(static_cast<const IntVector&>(z));
            std::size_t i = n_;
            while (i > 0) {
                --i;
                if (z[i] < hi_[i]) {
                    z[i] += 1;
                    break;
                }
                z[i] = lo_[i];
                if (i == 0) return;
            }
            if (n_ == 0) return;
        }
    }

  private:
    void prepare_fast_path() {
        // Every product T_ij (z_j - off_j) and their sum must stay below 2^125.
        const Integer limit = Integer(1) << 62;
        Integer max_t = 0, max_z = 0;
        for (const auto& x : T_.entries()) max_t = std::max(max_t, Integer(abs(x)));
        for (std::size_t i = 0; i < n_; ++i) {
            if (abs(lo_[i]) >= limit || abs(hi_[i]) >= limit || abs(offset_[i]) >= limit) return;
            max_z = std::max(max_z, Integer(abs(lo_[i] - offset_[i])));
            max_z = std::max(max_z, Integer(abs(hi_[i] - offset_[i])));
        }
        if (D_ >= (Integer(1) << 120) || max_t >= (Integer(1) << 120)) return;
        if (Integer(max_t * max_z * static_cast<unsigned long>(n_)) >= (Integer(1) << 125)) return;
        T128_.clear();
        for (const auto& x : T_.entries()) T128_.push_back(from_integer<Checked128>(x).value());
        for (std::size_t i = 0; i < n_; ++i) {
            off128_.push_back(from_integer<Checked128>(offset_[i]).value());
            lo64_.push_back(lo_[i].get_si());
            hi64_.push_back(hi_[i].get_si());
        }
        D128_ = from_integer<Checked128>(D_).value();
        fast_ = true;
    }

    std::size_t n_;
    ExactMatrix T_;
    IntVector offset_;
    Integer D_;
    IntVector lo_, hi_;

    bool fast_ = false;
    std::vector<int128> T128_, off128_;
    std::vector<std::int64_t> lo64_, hi64_;
    int128 D128_ = 0;
};

} // namespace latgen

// include/latgen/sampling.hpp: random parallelepipeds and uniform points in them.

#pragma once

#include "latgen/exactmat.hpp"
#include "latgen/lattice.hpp"
#include "latgen/region.hpp"
#include "latgen/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latgen {

inline constexpr std::uint64_t kDefaultMaxRejects = 1'000'000;
inline constexpr int kMaxDegenerateDraws = 64;

// {V a + translate : a in [0,1)^n} for an integer matrix V with det V != 0.
class Parallelepiped {
  public:
    explicit Parallelepiped(ExactMatrix V) : Parallelepiped(V, IntVector(V.rows(), Integer(0))) {}

    Parallelepiped(ExactMatrix V, IntVector translate)
        : V_(std::move(V)), translate_(std::move(translate)), region_(build_region(V_, translate_)) {}

    std::size_t dim() const noexcept { return V_.rows(); }
    const ExactMatrix& generators() const noexcept { return V_; }
    const IntVector& translate() const noexcept { return translate_; }
    const LinearRegion& region() const noexcept { return region_; }
    // Number of resampled degenerate draws that preceded this one.
    std::uint64_t resamples = 0;

    // Half-open membership, decided in integers: a = adj(V)(z - t) / det V.
    bool contains(std::span<const Integer> z) const { return region_.contains(z); }

  private:
    static LinearRegion build_region(const ExactMatrix& V, const IntVector& t) {
        const std::size_t n = V.rows();
        if (!V.square() || n == 0) throw std::invalid_argument("parallelepiped needs n nonzero generators in Z^n");
        if (t.size() != n) throw std::invalid_argument("translate has wrong dimension");
        const Integer d = det(V);
        if (sgn(d) == 0) throw SingularMatrixError();
        ExactMatrix T = adjugate(V);
        if (sgn(d) < 0)
            for (std::size_t i = 0; i < n; ++i) T.negate_row(i);
        // With a in [0,1)^n the extreme sums of negative and positive entries are
        // never attained, so the tight integer box excludes them.
        IntVector lo(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            Integer neg = 0, pos = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (sgn(V(i, j)) < 0) neg += V(i, j);
                else pos += V(i, j);
            }
            lo[i] = t[i] + neg + (sgn(neg) < 0 ? 1 : 0);
            hi[i] = t[i] + pos - (sgn(pos) > 0 ? 1 : 0);
        }
        return LinearRegion(std::move(T), t, abs(d), std::move(lo), std::move(hi));
    }

    ExactMatrix V_;
    IntVector translate_;
    LinearRegion region_;
};

// n generators with coordinates uniform on [-C, C]; singular draws are redrawn.
inline Parallelepiped random_parallelepiped(std::size_t n, const Integer& C, RngStream& rng) {
    if (n == 0) throw std::invalid_argument("random_parallelepiped: n must be >= 1");
    if (C < 1) throw std::invalid_argument("random_parallelepiped: C must be >= 1");
    for (int attempt = 0; attempt < kMaxDegenerateDraws; ++attempt) {
        ExactMatrix V(n, n);
        // Column by column, so generator j is the j-th vector drawn.
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) V(i, j) = rng.uniform_in(Integer(-C), C);
        if (sgn(det(V)) == 0) continue;
        Parallelepiped P(std::move(V));
        P.resamples = static_cast<std::uint64_t>(attempt);
        return P;
    }
    throw std::runtime_error("random_parallelepiped: " + std::to_string(kMaxDegenerateDraws) +
                             " consecutive singular draws");
}

// Uniform integer point of P by rejection from its bounding box.
inline IntVector sample_integer_point(const Parallelepiped& P, RngStream& rng,
                                      std::uint64_t max_rejects = kDefaultMaxRejects) {
    IntVector z;
    P.region().sample(rng, z, max_rejects);
    return z;
}

// Uniform lattice point in [0,B)^n, sampled in coordinates. The region is
// built once per (lattice, window).
class WindowSampler {
  public:
    WindowSampler(const LatticeBasis& L, const Window& W) : L_(L), region_(L.window_region(W)) {}

    IntVector sample_coordinates(RngStream& rng, std::uint64_t max_rejects = kDefaultMaxRejects) const {
        IntVector c;
        region_.sample(rng, c, max_rejects);
        return c;
    }

    RatVector sample(RngStream& rng, std::uint64_t max_rejects = kDefaultMaxRejects) const {
        return L_.vector_at(sample_coordinates(rng, max_rejects));
    }

    const LinearRegion& region() const noexcept { return region_; }

  private:
    const LatticeBasis& L_;
    LinearRegion region_;
};

inline RatVector sample_lattice_point_in_window(const LatticeBasis& L, const Window& W, RngStream& rng,
                                                std::uint64_t max_rejects = kDefaultMaxRejects) {
    return WindowSampler(L, W).sample(rng, max_rejects);
}

} // namespace latgen

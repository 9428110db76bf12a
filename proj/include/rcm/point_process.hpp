#pragma once

// Seeded sampling of homogeneous Poisson processes on bounded regions,
// superposition, thinning and the sprinkling decomposition.
//
// Sampling is count-then-place: draw N ~ Poisson(intensity * vol(bounding
// box)), place N points uniformly in the box, keep those inside the region.
// By the restriction theorem the kept points are exactly the process on the
// region.  Given a stream the result is bit-reproducible.

#include <functional>
#include <stdexcept>

#include "rcm/geometry.hpp"
#include "rcm/point_set.hpp"
#include "rcm/rng.hpp"

namespace rcm {

struct RngContract {
  std::uint64_t master_seed = 0;
  RngStream substream(std::uint64_t k) const {
    return RngStream::from(master_seed, k);
  }
};

PointSet sample_homogeneous(double intensity, const Region& region,
                            RngStream stream, std::int64_t id_base = 1);

// Union of two configurations; b's ids are re-keyed past a's on conflict.
PointSet superpose(const PointSet& a, const PointSet& b);

// Independent retention with probability retain(x); draws are consumed in
// input id order, so the result is deterministic given the stream.
PointSet thin(const PointSet& x, const std::function<double(const double*)>& retain,
              RngStream stream);

struct SprinkleDecomposition {
  double base_intensity = 0.0;      // lambda
  double sprinkle_intensity = 0.0;  // eps1 = (mu - lambda) / k
  int count = 40;                   // k

  double total() const { return base_intensity + count * sprinkle_intensity; }
};

SprinkleDecomposition sprinkle_decomposition(double mu, double lambda, int k = 40);

// ---------------------------------------------------------------------------
// Graded samples: shared-seed coupling across intensities.
//
// Points are drawn at a reference intensity and each carries an independent
// uniform "birth level"; the set of points with birth <= lambda is exactly a
// Poisson process of intensity lambda, and is a subset of the set for any
// larger lambda.  This realizes the standard coupling that makes crossing
// and one-arm indicators monotone in lambda run by run.

struct GradedSample {
  int dim = 0;
  double ref_intensity = 0.0;
  PointSet points;            // all points at the reference intensity
  std::vector<double> birth;  // birth[i] in (0, ref_intensity]

  // Indices of points active at `lambda`, optionally restricted to a region.
  template <class F>
  void for_active(double lambda, F&& f) const {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (birth[i] <= lambda) f(i);
  }
};

GradedSample sample_graded(double ref_intensity, const Region& region,
                           RngStream stream, std::int64_t id_base = 1);

}  // namespace rcm

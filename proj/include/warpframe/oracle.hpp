#pragma once

// Forward direction: explicit immersions into eps I x_a M^N(c) and the
// hypothesis bundle they induce. All derivatives are taken with nested dual
// numbers, so the induced fields and their coordinate derivatives are exact up
// to roundoff.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpframe/bundle_data.hpp"

namespace warpframe {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

/// x (chart coordinates) -> packed ambient point (t, p_0 .. p_N), at every scalar depth the
/// oracle needs.
struct ImmersionMap {
  std::function<std::vector<double>(const std::vector<double>&)> f0;
  std::function<std::vector<D1>(const std::vector<D1>&)> f1;
  std::function<std::vector<D2>(const std::vector<D2>&)> f2;
  std::function<std::vector<D3>(const std::vector<D3>&)> f3;

  template <class Fn>
  static ImmersionMap from(Fn fn) {
    return {fn, fn, fn, fn};
  }

  template <class S>
  std::vector<S> operator()(const std::vector<S>& x) const {
    if constexpr (std::is_same_v<S, double>) return f0(x);
    else if constexpr (std::is_same_v<S, D1>) return f1(x);
    else if constexpr (std::is_same_v<S, D2>) return f2(x);
    else return f3(x);
  }
};

struct ExplicitImmersion {
  SignatureSpec spec;
  WarpingFunction warping;
  ChartGrid grid;
  ImmersionMap map;
  std::optional<Provenance> tag;

  AmbientPoint point_at(const std::vector<double>& x) const;
  AmbientPoint point(std::size_t node) const;
  /// Throws std::invalid_argument if some node leaves the quadric (1e-10) or the warping domain.
  void validate() const;
};

/// Order in which normal candidates fill bundle slots: (candidate, slot) pairs.
/// Candidate 0 is dt, candidate 1 + b is the fiber direction E_b projected to the quadric.
using NormalPlan = std::vector<std::pair<int, int>>;

struct InduceOptions {
  bool analytic_derivatives = true;  // also store d/dx_k of every field
};

/// Throws std::runtime_error naming the node when the induced metric or the normal
/// bundle does not have the declared signature.
GeometricData induce_data(const ExplicitImmersion& imm, const InduceOptions& options = {});

/// Chooses the normal plan at the base node.
NormalPlan plan_normals(const ExplicitImmersion& imm);

struct Example {
  ExplicitImmersion immersion;
  GeometricData data;
};

using Params = std::map<std::string, std::string>;

std::vector<std::string> example_names();

/// Named families: slice, vertical_geodesic, great_subsphere, helix, desitter_slice,
/// lorentz_cylinder. Unknown names and bad parameters throw std::invalid_argument.
ExplicitImmersion example_immersion(const std::string& name, const Params& params = {});
Example canonical_example(const std::string& name, const Params& params = {},
                          const InduceOptions& options = {});

/// Same family and parameters on a grid refined by `factor`. Needs data.source.
GeometricData refine_example(const GeometricData& data, int factor);

}  // namespace warpframe

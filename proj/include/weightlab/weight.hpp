#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "weightlab/error.hpp"

namespace weightlab {

enum class DomainKind { Disc, Plane };

class Domain {
 public:
  constexpr explicit Domain(DomainKind kind) : kind_(kind) {}
  static constexpr Domain disc() { return Domain(DomainKind::Disc); }
  static constexpr Domain plane() { return Domain(DomainKind::Plane); }

  constexpr DomainKind kind() const { return kind_; }
  constexpr bool is_disc() const { return kind_ == DomainKind::Disc; }
  constexpr double a() const {
    return kind_ == DomainKind::Disc ? 1.0 : std::numeric_limits<double>::infinity();
  }
  const char* name() const { return is_disc() ? "disc" : "plane"; }
  constexpr bool operator==(const Domain&) const = default;

 private:
  DomainKind kind_;
};

// Disc coordinates: x = log r and t = log(1/(1-r)).
double disc_x_from_t(double t);
double disc_t_from_x(double x);

// phi(x) = log v(e^x). slope is the right derivative d phi/dx.
struct ClosedForm {
  std::string expression;
  std::function<double(double)> phi;
  std::function<double(double)> slope;
  std::vector<double> kinks;
};

// Segment i is [breakpoints[i], breakpoints[i+1]) with slope slopes[i]; the last slope
// continues to the right and phi is constant (values[0]) left of breakpoints[0].
struct PiecewiseLogProfile {
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::vector<double> slopes;
};

struct Tabulated {
  std::vector<double> grid;
  std::vector<double> log_values;
};

using WeightSource = std::variant<ClosedForm, PiecewiseLogProfile, Tabulated>;

struct WeightImpl;

class RadialWeight {
 public:
  RadialWeight(Domain domain, WeightSource source, std::string label, bool rapidly_growing = false);

  const Domain& domain() const { return domain_; }
  const std::string& label() const { return label_; }
  const WeightSource& source() const;
  bool is_piecewise() const;
  bool rapidly_growing_construction() const { return rapidly_growing_; }

  // log v(e^x); x = -inf means r = 0.
  double log_at(double x) const;
  double slope_at(double x) const;
  // log v(r), 0 <= r < a.
  double eval_log(double r) const;
  // x-locations where the slope jumps.
  std::vector<double> kinks() const;

 private:
  Domain domain_;
  std::shared_ptr<const WeightImpl> impl_;
  std::string label_;
  bool rapidly_growing_;
};

RadialWeight make_builtin(std::string_view family, const std::vector<double>& params, Domain domain);
RadialWeight make_piecewise(Domain domain, std::vector<double> xs, std::vector<double> phis, std::string label);
PiecewiseLogProfile piecewise_from_points(const std::vector<double>& xs, const std::vector<double>& phis);

// w = v/(1-r) on the disc.
RadialWeight divide_by_one_minus_r(const RadialWeight& v);
// log w = log v + c.
RadialWeight scale_weight(const RadialWeight& v, double log_factor);

struct GridSpec {
  int depth = 40;
  int points_per_level = 8;
  double x_floor = -20.0;
  int prefix_points = 32;
  // Optional explicit level boundaries in x (plane only); overrides the unit-width levels.
  std::vector<double> level_edges;

  void validate() const;
  double x_max(Domain d) const;
  GridSpec refined() const;
};

struct LogProfile {
  Domain domain = Domain::disc();
  std::vector<double> xs;
  std::vector<double> phis;
  // -1 for the left prefix, else the level index in [0, depth).
  std::vector<int> levels;
  int depth = 0;

  std::size_t size() const { return xs.size(); }
  // Half-open index range of a level.
  std::pair<std::size_t, std::size_t> level_range(int level) const;
  // Index of the first non-prefix point.
  std::size_t main_begin() const;
};

// Grid abscissae and levels for a domain; kinks are merged in.
LogProfile make_grid(Domain domain, const GridSpec& g, const std::vector<double>& kinks = {});
LogProfile sample_log_profile(const RadialWeight& w, const GridSpec& g);
double eval_log(const RadialWeight& w, double r);

// Checks increasing and boundary growth on the grid; returns the violated invariant or "".
std::string check_weight_invariants(const RadialWeight& w, const GridSpec& g);

// family(p1,...)@disc|plane or piecewise:<path>.json
RadialWeight parse_weight_spec(std::string_view spec);
RadialWeight load_piecewise_json(const std::string& path);

}  // namespace weightlab

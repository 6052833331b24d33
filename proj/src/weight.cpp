#include "weightlab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "weightlab/expr.hpp"

namespace weightlab {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double dt_dx(double x) {
  // dt/dx = r/(1-r) = 1/(e^{-x} - 1)
  return 1.0 / std::expm1(-x);
}

std::string format_params(std::string_view family, const std::vector<double>& params, Domain d) {
  std::ostringstream os;
  os.precision(12);
  os << family << '(';
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  os << ")@" << d.name();
  return os.str();
}

void require_arity(std::string_view family, const std::vector<double>& params, std::size_t n) {
  if (params.size() != n)
    throw Error(ErrorCode::InvalidParams, std::string(family) + " expects " + std::to_string(n) + " parameter(s), got " +
                                              std::to_string(params.size()));
  for (double p : params)
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidParams, std::string(family) + ": non-finite parameter");
}

void require_positive(std::string_view family, const char* name, double value) {
  if (!(value > 0.0))
    throw Error(ErrorCode::InvalidParams, std::string(family) + ": " + name + " must be > 0");
}

void require_domain(std::string_view family, Domain want, Domain got) {
  if (want != got)
    throw Error(ErrorCode::InvalidForDomain,
                std::string(family) + " is defined on the " + want.name() + ", not the " + got.name());
}

void validate_piecewise(const PiecewiseLogProfile& p, Domain d) {
  const auto n = p.breakpoints.size();
  if (n == 0 || p.values.size() != n || p.slopes.size() != n)
    throw Error(ErrorCode::WeightInvalid, "piecewise profile needs equal, nonzero numbers of breakpoints/values/slopes");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.breakpoints[i]) || !std::isfinite(p.values[i]) || !std::isfinite(p.slopes[i]))
      throw Error(ErrorCode::WeightInvalid, "piecewise profile has non-finite entries");
    if (p.slopes[i] < 0.0) throw Error(ErrorCode::WeightInvalid, "v nondecreasing: negative slope in phi");
    if (i + 1 < n) {
      if (!(p.breakpoints[i + 1] > p.breakpoints[i]))
        throw Error(ErrorCode::WeightInvalid, "breakpoints must be strictly increasing");
      double predicted = p.values[i] + p.slopes[i] * (p.breakpoints[i + 1] - p.breakpoints[i]);
      if (std::abs(predicted - p.values[i + 1]) > 1e-9 * std::max(1.0, std::abs(p.values[i + 1])))
        throw Error(ErrorCode::WeightInvalid, "phi discontinuous at breakpoint " + std::to_string(i + 1));
    }
  }
  if (d.is_disc() && p.breakpoints.back() >= 0.0)
    throw Error(ErrorCode::WeightInvalid, "disc breakpoints must satisfy x = log r < 0");
}

double pw_log(const PiecewiseLogProfile& p, double x) {
  if (!(x >= p.breakpoints.front())) return p.values.front();
  auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), x);
  auto i = static_cast<std::size_t>(it - p.breakpoints.begin()) - 1;
  return p.values[i] + p.slopes[i] * (x - p.breakpoints[i]);
}

double pw_slope(const PiecewiseLogProfile& p, double x) {
  if (!(x >= p.breakpoints.front())) return 0.0;
  auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), x);
  return p.slopes[static_cast<std::size_t>(it - p.breakpoints.begin()) - 1];
}

RadialWeight rapid_disc(double beta, int levels) {
  std::vector<double> xs, phis;
  for (int n = 0; n <= levels; ++n) {
    xs.push_back(-std::ldexp(1.0, -n));
    phis.push_back(beta * std::ldexp(1.0, n));
  }
  return RadialWeight(Domain::disc(), piecewise_from_points(xs, phis),
                      format_params("rapid_disc", {beta}, Domain::disc()), true);
}

}  // namespace

struct WeightImpl {
  WeightSource source;
  PiecewiseLogProfile pw;  // evaluation form for piecewise and tabulated sources
};

double disc_x_from_t(double t) { return t < 1.0 ? std::log(-std::expm1(-t)) : std::log1p(-std::exp(-t)); }
double disc_t_from_x(double x) { return x < -1.0 ? -std::log1p(-std::exp(x)) : -std::log(-std::expm1(x)); }

RadialWeight::RadialWeight(Domain domain, WeightSource source, std::string label, bool rapidly_growing)
    : domain_(domain), label_(std::move(label)), rapidly_growing_(rapidly_growing) {
  auto impl = std::make_shared<WeightImpl>();
  if (auto* p = std::get_if<PiecewiseLogProfile>(&source)) {
    validate_piecewise(*p, domain);
    impl->pw = *p;
  } else if (auto* t = std::get_if<Tabulated>(&source)) {
    impl->pw = piecewise_from_points(t->grid, t->log_values);
    validate_piecewise(impl->pw, domain);
  } else {
    auto& cf = std::get<ClosedForm>(source);
    if (!cf.phi || !cf.slope) throw Error(ErrorCode::WeightInvalid, "closed form needs phi and slope");
  }
  impl->source = std::move(source);
  impl_ = std::move(impl);
}

const WeightSource& RadialWeight::source() const { return impl_->source; }

bool RadialWeight::is_piecewise() const { return !std::holds_alternative<ClosedForm>(impl_->source); }

double RadialWeight::log_at(double x) const {
  if (auto* cf = std::get_if<ClosedForm>(&impl_->source)) return cf->phi(x);
  return pw_log(impl_->pw, x);
}

double RadialWeight::slope_at(double x) const {
  if (auto* cf = std::get_if<ClosedForm>(&impl_->source)) return cf->slope(x);
  return pw_slope(impl_->pw, x);
}

double RadialWeight::eval_log(double r) const {
  if (!(r >= 0.0) || !(r < domain_.a()))
    throw Error(ErrorCode::OutOfDomain, "r=" + std::to_string(r) + " outside [0, a) for " + label_);
  if (r == 0.0) return log_at(-std::numeric_limits<double>::infinity());
  return log_at(std::log(r));
}

std::vector<double> RadialWeight::kinks() const {
  if (auto* cf = std::get_if<ClosedForm>(&impl_->source)) return cf->kinks;
  return impl_->pw.breakpoints;
}

PiecewiseLogProfile piecewise_from_points(const std::vector<double>& xs, const std::vector<double>& phis) {
  if (xs.size() != phis.size() || xs.size() < 2)
    throw Error(ErrorCode::WeightInvalid, "piecewise weight needs at least two (x, phi) points of equal count");
  PiecewiseLogProfile p;
  p.breakpoints = xs;
  p.values = phis;
  p.slopes.resize(xs.size());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i + 1] > xs[i])) throw Error(ErrorCode::WeightInvalid, "xs must be strictly increasing");
    p.slopes[i] = (phis[i + 1] - phis[i]) / (xs[i + 1] - xs[i]);
  }
  p.slopes.back() = p.slopes[xs.size() - 2];
  return p;
}

RadialWeight make_piecewise(Domain domain, std::vector<double> xs, std::vector<double> phis, std::string label) {
  return RadialWeight(domain, piecewise_from_points(xs, phis), std::move(label));
}

RadialWeight make_builtin(std::string_view family, const std::vector<double>& params, Domain domain) {
  const std::string label = format_params(family, params, domain);
  if (family == "power_disc") {
    require_arity(family, params, 1);
    require_positive(family, "alpha", params[0]);
    require_domain(family, Domain::disc(), domain);
    const double a = params[0];
    return RadialWeight(domain,
                        ClosedForm{"(1-r)^-" + std::to_string(a), [a](double x) { return a * disc_t_from_x(x); },
                                   [a](double x) { return a * dt_dx(x); }, {}},
                        label);
  }
  if (family == "exp_inv_disc") {
    require_arity(family, params, 2);
    require_positive(family, "beta", params[0]);
    require_positive(family, "p", params[1]);
    require_domain(family, Domain::disc(), domain);
    const double b = params[0], p = params[1];
    return RadialWeight(domain,
                        ClosedForm{"exp(beta/(1-r)^p)",
                                   [b, p](double x) { return b * std::exp(p * disc_t_from_x(x)); },
                                   [b, p](double x) { return b * p * std::exp(p * disc_t_from_x(x)) * dt_dx(x); },
                                   {}},
                        label);
  }
  if (family == "log_power_disc") {
    require_arity(family, params, 1);
    require_positive(family, "alpha", params[0]);
    require_domain(family, Domain::disc(), domain);
    const double a = params[0];
    return RadialWeight(domain,
                        ClosedForm{"log(e/(1-r))^alpha", [a](double x) { return a * std::log1p(disc_t_from_x(x)); },
                                   [a](double x) { return a * dt_dx(x) / (1.0 + disc_t_from_x(x)); }, {}},
                        label);
  }
  if (family == "exp_plane") {
    require_arity(family, params, 1);
    require_positive(family, "p", params[0]);
    require_domain(family, Domain::plane(), domain);
    const double p = params[0];
    return RadialWeight(domain,
                        ClosedForm{"exp(r^p)", [p](double x) { return std::exp(p * x); },
                                   [p](double x) { return p * std::exp(p * x); }, {}},
                        label);
  }
  if (family == "power_exp_plane") {
    require_arity(family, params, 2);
    if (!(params[0] >= 0.0)) throw Error(ErrorCode::InvalidParams, "power_exp_plane: sigma must be >= 0");
    require_positive(family, "p", params[1]);
    require_domain(family, Domain::plane(), domain);
    const double s = params[0], p = params[1];
    return RadialWeight(domain,
                        ClosedForm{"(1+r)^sigma exp(r^p)",
                                   [s, p](double x) { return s * std::log1p(std::exp(x)) + std::exp(p * x); },
                                   [s, p](double x) {
                                     double r = std::exp(x);
                                     return s * r / (1.0 + r) + p * std::exp(p * x);
                                   },
                                   {}},
                        label);
  }
  if (family == "rapid_disc") {
    require_arity(family, params, 1);
    require_positive(family, "beta", params[0]);
    require_domain(family, Domain::disc(), domain);
    return rapid_disc(params[0], 60);
  }
  throw Error(ErrorCode::UnknownFamily, "unknown weight family '" + std::string(family) + "'");
}

RadialWeight divide_by_one_minus_r(const RadialWeight& v) {
  if (!v.domain().is_disc()) throw Error(ErrorCode::InvalidForDomain, "v/(1-r) is defined on the disc only");
  return RadialWeight(v.domain(),
                      ClosedForm{"v/(1-r)", [v](double x) { return v.log_at(x) + disc_t_from_x(x); },
                                 [v](double x) { return v.slope_at(x) + dt_dx(x); }, v.kinks()},
                      v.label() + "/(1-r)");
}

RadialWeight scale_weight(const RadialWeight& v, double log_factor) {
  std::ostringstream os;
  os.precision(12);
  os << "exp(" << log_factor << ")*" << v.label();
  return RadialWeight(v.domain(),
                      ClosedForm{os.str(), [v, log_factor](double x) { return v.log_at(x) + log_factor; },
                                 [v](double x) { return v.slope_at(x); }, v.kinks()},
                      os.str(), v.rapidly_growing_construction());
}

void GridSpec::validate() const {
  if (depth < 1) throw Error(ErrorCode::InvalidParams, "grid depth must be >= 1");
  if (depth > 52) throw Error(ErrorCode::InvalidParams, "grid depth > 52 underflows 1-r");
  if (points_per_level < 1) throw Error(ErrorCode::InvalidParams, "points per level must be >= 1");
  if (prefix_points < 0) throw Error(ErrorCode::InvalidParams, "prefix points must be >= 0");
  if (!level_edges.empty()) {
    if (level_edges.size() < 2) throw Error(ErrorCode::InvalidParams, "level edges need at least two values");
    for (std::size_t i = 0; i + 1 < level_edges.size(); ++i)
      if (!(level_edges[i + 1] > level_edges[i]))
        throw Error(ErrorCode::InvalidParams, "level edges must be strictly increasing");
  }
}

double GridSpec::x_max(Domain d) const {
  if (d.is_disc()) return disc_x_from_t(depth * kLn2);
  if (!level_edges.empty()) return level_edges.back();
  return -1.0 + depth;
}

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  g.points_per_level *= 2;
  g.prefix_points *= 2;
  return g;
}

std::pair<std::size_t, std::size_t> LogProfile::level_range(int level) const {
  auto lo = std::lower_bound(levels.begin(), levels.end(), level);
  auto hi = std::upper_bound(lo, levels.end(), level);
  return {static_cast<std::size_t>(lo - levels.begin()), static_cast<std::size_t>(hi - levels.begin())};
}

std::size_t LogProfile::main_begin() const { return level_range(-1).second; }

LogProfile make_grid(Domain domain, const GridSpec& g, const std::vector<double>& kinks) {
  g.validate();
  if (domain.is_disc() && !g.level_edges.empty())
    throw Error(ErrorCode::InvalidParams, "explicit level edges are supported on the plane only");
  LogProfile p;
  p.domain = domain;
  const int ppl = g.points_per_level;
  std::vector<double> main_x;
  std::vector<int> main_level;
  if (domain.is_disc()) {
    p.depth = g.depth;
    for (int k = 1; k <= g.depth * ppl; ++k) {
      main_x.push_back(disc_x_from_t(static_cast<double>(k) / ppl * kLn2));
      main_level.push_back((k - 1) / ppl);
    }
  } else if (g.level_edges.empty()) {
    p.depth = g.depth;
    for (int k = 0; k <= g.depth * ppl; ++k) {
      main_x.push_back(-1.0 + static_cast<double>(k) / ppl);
      main_level.push_back(std::min(k / ppl, g.depth - 1));
    }
  } else {
    const auto& e = g.level_edges;
    p.depth = static_cast<int>(e.size()) - 1;
    for (int l = 0; l < p.depth; ++l)
      for (int j = 0; j < ppl; ++j) {
        main_x.push_back(e[l] + (e[l + 1] - e[l]) * j / ppl);
        main_level.push_back(l);
      }
    main_x.push_back(e.back());
    main_level.push_back(p.depth - 1);
  }
  const double x0 = main_x.front();
  if (g.prefix_points > 0 && g.x_floor < x0) {
    for (int k = 0; k < g.prefix_points; ++k) {
      p.xs.push_back(g.x_floor + (x0 - g.x_floor) * k / g.prefix_points);
      p.levels.push_back(-1);
    }
  }
  p.xs.insert(p.xs.end(), main_x.begin(), main_x.end());
  p.levels.insert(p.levels.end(), main_level.begin(), main_level.end());

  // Merge kinks: a kink within a few ulps of a grid point replaces it, otherwise it is inserted.
  std::vector<double> ks;
  for (double k : kinks)
    if (std::isfinite(k) && k >= p.xs.front() && k <= p.xs.back()) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  if (!ks.empty()) {
    std::vector<double> xs;
    std::vector<int> lv;
    xs.reserve(p.xs.size() + ks.size());
    lv.reserve(p.xs.size() + ks.size());
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(std::abs(a), std::abs(b)); };
    std::size_t ki = 0;
    for (std::size_t i = 0; i < p.xs.size(); ++i) {
      double x = p.xs[i];
      bool replaced = false;
      while (ki < ks.size() && ks[ki] < p.xs[i]) {
        double k = ks[ki++];
        if (near(k, p.xs[i])) {
          x = k;
          replaced = true;
          continue;
        }
        if (!xs.empty() && near(k, xs.back())) {
          xs.back() = k;
          continue;
        }
        // Disc levels are right-closed in t, plane levels left-closed in x.
        int level = domain.is_disc() ? p.levels[i] : (i > 0 ? p.levels[i - 1] : p.levels[i]);
        xs.push_back(k);
        lv.push_back(level);
      }
      if (!replaced && ki < ks.size() && near(ks[ki], x)) x = ks[ki++];
      if (!xs.empty() && x <= xs.back()) continue;
      xs.push_back(x);
      lv.push_back(p.levels[i]);
    }
    p.xs = std::move(xs);
    p.levels = std::move(lv);
  }
  return p;
}

LogProfile sample_log_profile(const RadialWeight& w, const GridSpec& g) {
  LogProfile p = make_grid(w.domain(), g, w.kinks());
  p.phis.resize(p.xs.size());
  for (std::size_t i = 0; i < p.xs.size(); ++i) {
    double phi = w.log_at(p.xs[i]);
    if (!std::isfinite(phi))
      throw Error(ErrorCode::Overflow, w.label() + ": log v not finite at x=" + std::to_string(p.xs[i]));
    p.phis[i] = phi;
    if (i > 0 && phi < p.phis[i - 1] - 1e-12 * std::max(1.0, std::abs(phi)))
      throw Error(ErrorCode::WeightInvalid, w.label() + ": v nondecreasing violated near x=" + std::to_string(p.xs[i]));
  }
  return p;
}

double eval_log(const RadialWeight& w, double r) { return w.eval_log(r); }

std::string check_weight_invariants(const RadialWeight& w, const GridSpec& g) {
  LogProfile p;
  try {
    p = sample_log_profile(w, g);
  } catch (const Error& e) {
    return e.what();
  }
  if (w.log_at(-std::numeric_limits<double>::infinity()) > p.phis.front() + 1e-12)
    return "v nondecreasing: v(0) exceeds v on the grid";
  const std::size_t b = p.main_begin();
  const std::size_t mid = b + (p.size() - b) / 2;
  if (w.domain().is_disc()) {
    if (!(p.phis.back() - p.phis[mid] > 1e-3)) return "disc growth: log v must increase towards r = 1";
  } else {
    // log r = o(log v): log v(r)/log r increases and exceeds a threshold on the tail.
    double x_mid = std::max(p.xs[mid], 1.0), x_end = p.xs.back();
    double q_mid = w.log_at(x_mid) / x_mid, q_end = p.phis.back() / x_end;
    if (!(q_end > q_mid && q_end > 2.0)) return "plane growth: log r = o(log v) violated";
  }
  return "";
}

RadialWeight load_piecewise_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open piecewise weight file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  if (!j.contains("xs") || !j.contains("phis") || !j.contains("domain"))
    throw Error(ErrorCode::ParseError, path + ": needs fields xs, phis, domain");
  auto xs = j.at("xs").get<std::vector<double>>();
  auto phis = j.at("phis").get<std::vector<double>>();
  auto dom = j.at("domain").get<std::string>();
  if (dom != "disc" && dom != "plane") throw Error(ErrorCode::ParseError, path + ": domain must be disc or plane");
  return make_piecewise(dom == "disc" ? Domain::disc() : Domain::plane(), std::move(xs), std::move(phis),
                        "piecewise:" + path);
}

RadialWeight parse_weight_spec(std::string_view spec_in) {
  std::string spec(spec_in);
  static const std::string kPiece = "piecewise:";
  if (spec.rfind(kPiece, 0) == 0) return load_piecewise_json(spec.substr(kPiece.size()));
  static const std::regex re(R"(^\s*([A-Za-z_][A-Za-z_0-9]*)\s*\((.*)\)\s*@\s*(disc|plane)\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re))
    throw Error(ErrorCode::ParseError, "weight spec '" + spec + "' is not family(p1,...)@disc|plane or piecewise:<file>");
  std::vector<double> params;
  std::string args = m[2].str();
  if (args.find_first_not_of(" \t") != std::string::npos) {
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) params.push_back(parse_number_expr(item));
  }
  return make_builtin(m[1].str(), params, m[3].str() == "disc" ? Domain::disc() : Domain::plane());
}

}  // namespace weightlab

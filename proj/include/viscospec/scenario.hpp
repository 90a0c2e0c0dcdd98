#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "viscospec/integrator.hpp"

namespace viscospec {

struct UnknownGenerator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initial-data scenario. The same scenario text always reproduces the
/// same initial state (seeded draws, fixed traversal order).
struct Scenario {
  std::string name = "unnamed";
  int d = 2;
  int n = 32;
  double length = 2.0 * M_PI;
  std::string generator = "taylor_green";
  double amplitude = 1.0;
  double delta = 0.0;
  std::array<int, 3> mode = {1, 0, 0};
  std::uint64_t seed = 0;
  double eps = 0.0;
  IntegratorConfig integrator;

  Grid grid() const { return Grid(d, n, length); }
};

namespace scenario_detail {

// Deterministic standard normals (Box-Muller over mt19937_64 uniforms);
// avoids the implementation-defined std::normal_distribution stream.
class NormalDraw {
 public:
  explicit NormalDraw(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() {
    // in (0, 1], safe for log
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::vector<cdouble> random_decay_spec(const Grid& g, NormalDraw& draw,
                                              double amplitude) {
  std::vector<cdouble> spec(g.size(), cdouble(0.0, 0.0));
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    double re = draw();
    double im = draw();
    auto idx = g.unravel(flat);
    double k2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double k = g.k_int(idx[a]);
      k2 += k * k;
    }
    if (k2 == 0.0) continue;  // zero-mean draws
    double decay = std::pow(std::sqrt(k2), -3.0);
    spec[flat] = amplitude * decay * cdouble(re, im);
  }
  return spec;
}

inline ScalarField dealiased(const ScalarField& f) { return dealias(f); }

inline VectorField finalize_vec(const VectorField& u) {
  auto p = project_divfree_vec(u);
  std::vector<ScalarField> comps;
  comps.reserve(p.dim());
  for (int i = 0; i < p.dim(); ++i) comps.push_back(dealias(p[i]));
  return VectorField(p.grid(), std::move(comps));
}

inline TensorField finalize_tensor(const TensorField& F) {
  auto p = project_divfree_tensor(F);
  std::vector<ScalarField> comps;
  comps.reserve(p.dim() * p.dim());
  for (int i = 0; i < p.dim(); ++i)
    for (int j = 0; j < p.dim(); ++j) comps.push_back(dealias(p(i, j)));
  return TensorField(p.grid(), std::move(comps));
}

inline VectorField taylor_green(const Grid& g, double amplitude) {
  std::vector<std::vector<double>> comp(g.d, std::vector<double>(g.size(), 0.0));
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto idx = g.unravel(p);
    double ax = g.k_scale() * g.x(idx[0]);  // node angle in [0, 2 pi)
    double ay = g.k_scale() * g.x(idx[1]);
    double cz = 1.0;
    if (g.d == 3) cz = std::cos(g.k_scale() * g.x(idx[2]));
    double sx = std::sin(ax), cx = std::cos(ax);
    double sy = std::sin(ay), cy = std::cos(ay);
    comp[0][p] = amplitude * sx * cy * cz;
    comp[1][p] = -amplitude * cx * sy * cz;
  }
  std::vector<ScalarField> comps;
  comps.reserve(g.d);
  for (int i = 0; i < g.d; ++i)
    comps.push_back(ScalarField::from_phys(g, std::move(comp[i])));
  return VectorField(g, std::move(comps));
}

inline VectorField single_mode_velocity(const Grid& g, double amplitude,
                                        const std::array<int, 3>& mode) {
  // cos(k.x) in a direction not parallel to k; the projection makes it
  // exactly divergence-free.
  std::vector<std::vector<double>> comp(g.d, std::vector<double>(g.size(), 0.0));
  double pol[3] = {static_cast<double>(-mode[1] - mode[2]),
                   static_cast<double>(mode[0]), static_cast<double>(mode[0])};
  if (pol[0] == 0.0 && pol[1] == 0.0 && pol[2] == 0.0) pol[0] = 1.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto idx = g.unravel(p);
    double phase = 0.0;
    for (int a = 0; a < g.d; ++a) phase += mode[a] * g.k_scale() * g.x(idx[a]);
    double c = std::cos(phase);
    for (int a = 0; a < g.d; ++a) comp[a][p] = amplitude * pol[a] * c;
  }
  std::vector<ScalarField> comps;
  comps.reserve(g.d);
  for (int i = 0; i < g.d; ++i)
    comps.push_back(ScalarField::from_phys(g, std::move(comp[i])));
  return VectorField(g, std::move(comps));
}

inline TensorField single_mode_tensor(const Grid& g, double amplitude,
                                      const std::array<int, 3>& mode) {
  std::vector<ScalarField> comps;
  comps.reserve(static_cast<std::size_t>(g.d) * g.d);
  for (int i = 0; i < g.d; ++i)
    for (int j = 0; j < g.d; ++j) {
      std::vector<double> vals(g.size());
      for (std::size_t p = 0; p < g.size(); ++p) {
        auto idx = g.unravel(p);
        double phase = 0.0;
        for (int a = 0; a < g.d; ++a) phase += mode[a] * g.k_scale() * g.x(idx[a]);
        // distinct quadratures per entry so columns differ
        vals[p] = amplitude * ((i + j) % 2 == 0 ? std::cos(phase) : std::sin(phase));
      }
      comps.push_back(ScalarField::from_phys(g, std::move(vals)));
    }
  return TensorField(g, std::move(comps));
}

}  // namespace scenario_detail

/// Build the projected, dealiased initial state of a scenario.
inline SimState make_initial(const Scenario& sc) {
  using namespace scenario_detail;
  const Grid g = sc.grid();
  SimState s;
  s.t = 0.0;
  s.eps = sc.eps;

  if (sc.generator == "taylor_green") {
    s.u = finalize_vec(taylor_green(g, sc.amplitude));
    s.F = TensorField::zero(g);
  } else if (sc.generator == "single_mode") {
    s.u = finalize_vec(single_mode_velocity(g, sc.amplitude, sc.mode));
    s.F = TensorField::zero(g);
  } else if (sc.generator == "random_divfree") {
    NormalDraw draw(sc.seed);
    std::vector<ScalarField> uc;
    for (int i = 0; i < g.d; ++i)
      uc.push_back(ScalarField::from_spec(g, random_decay_spec(g, draw, sc.amplitude)));
    s.u = finalize_vec(VectorField(g, std::move(uc)));
    std::vector<ScalarField> Fc;
    for (int i = 0; i < g.d * g.d; ++i)
      Fc.push_back(ScalarField::from_spec(g, random_decay_spec(g, draw, sc.amplitude)));
    s.F = finalize_tensor(TensorField(g, std::move(Fc)));
  } else if (sc.generator == "identity_plus_perturbation") {
    s.u = finalize_vec(taylor_green(g, sc.amplitude));
    auto pert = single_mode_tensor(g, sc.delta, sc.mode);
    std::vector<ScalarField> Fc;
    for (int i = 0; i < g.d; ++i)
      for (int j = 0; j < g.d; ++j) {
        std::vector<double> vals(pert(i, j).phys());
        if (i == j)
          for (auto& v : vals) v += 1.0;
        Fc.push_back(ScalarField::from_phys(g, std::move(vals)));
      }
    s.F = finalize_tensor(TensorField(g, std::move(Fc)));
  } else {
    throw UnknownGenerator("unknown generator: " + sc.generator);
  }
  return s;
}

/// Flat key = value config format; '#' starts a comment.
inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "name") sc.name = val;
      else if (key == "d") sc.d = std::stoi(val);
      else if (key == "n") sc.n = std::stoi(val);
      else if (key == "length") sc.length = std::stod(val);
      else if (key == "generator") sc.generator = val;
      else if (key == "amplitude") sc.amplitude = std::stod(val);
      else if (key == "delta") sc.delta = std::stod(val);
      else if (key == "mode") {
        std::istringstream ms(val);
        sc.mode = {0, 0, 0};
        for (int a = 0; a < 3 && (ms >> sc.mode[a]); ++a) {}
      } else if (key == "seed") sc.seed = std::stoull(val);
      else if (key == "eps") sc.eps = std::stod(val);
      else if (key == "dt") sc.integrator.dt = std::stod(val);
      else if (key == "t_end") sc.integrator.t_end = std::stod(val);
      else if (key == "cfl_safety") sc.integrator.cfl_safety = std::stod(val);
      else if (key == "snapshot_every") sc.integrator.snapshot_every = std::stoi(val);
      else throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + key);
    } catch (const std::invalid_argument&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  return parse_scenario(in);
}

}  // namespace viscospec

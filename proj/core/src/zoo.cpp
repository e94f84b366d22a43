#include "anholonome/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "anholonome/errors.hpp"
#include "anholonome/rng.hpp"

namespace anholonome {

namespace {

VectorField coordinate_field(int n, int j, std::string label) {
  return make_vector_field(n, std::move(label), [j](auto, auto out) { out[j] = 1.0; });
}

ChartFunction identity_coefficients(int n, int k) {
  return make_chart_function(n, k * k, [k](auto, auto out) {
    for (int r = 0; r < k; ++r) out[r * k + r] = 1.0;
  });
}

std::vector<ChartPoint> validation_points(int n) {
  SplitMix64 rng(0x5eed5a3b1e5ULL);
  std::vector<ChartPoint> pts;
  for (int i = 0; i < 8; ++i) {
    ChartPoint p{Eigen::VectorXd(n)};
    for (int j = 0; j < n; ++j) p.coords[j] = rng.uniform(-2.0, 2.0);
    pts.push_back(std::move(p));
  }
  return pts;
}

CState state(std::initializer_list<double> x, std::initializer_list<double> v) {
  CState s{ChartPoint{Eigen::VectorXd(static_cast<Eigen::Index>(x.size()))},
           Eigen::VectorXd(static_cast<Eigen::Index>(v.size()))};
  std::copy(x.begin(), x.end(), s.x.coords.data());
  std::copy(v.begin(), v.end(), s.v.data());
  return s;
}

GroupModel translations(int n, const std::vector<int>& coords, const std::vector<std::string>& labels) {
  std::vector<VectorField> fund;
  for (std::size_t i = 0; i < coords.size(); ++i) fund.push_back(coordinate_field(n, coords[i], labels[i]));
  const int k = static_cast<int>(coords.size());
  return GroupModel(std::move(fund), Tensor3(k, k, k));
}

// L = 1/2 |u|^2 on R^3, constraint zdot = x xdot. Symmetric under
// translations in y and z; y is a horizontal symmetry.
ConstrainedSystem paper_particle_system(double potential_slope) {
  auto lag = make_scalar_on_tq(3, [potential_slope](auto x, auto u) {
    return 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) + potential_slope * x[1];
  });
  Frame frame({make_vector_field(3, "x",
                                 [](auto x, auto out) {
                                   out[0] = 1.0;
                                   out[2] = x[0];
                                 }),
               coordinate_field(3, 1, "y"), coordinate_field(3, 2, "z")});
  return ConstrainedSystem("paper-particle", {"x", "y", "z"}, std::move(lag), AdaptedFrame(std::move(frame), 2),
                           {1});
}

InvariantFrameSplit paper_particle_split(ConstrainedSystem sys) {
  return InvariantFrameSplit(std::move(sys), translations(3, {1, 2}, {"y", "z"}), SplitBlocks{{1}, {0}, {2}, {}},
                             identity_coefficients(3, 2), Trivialization{{0}, {1, 2}, Eigen::VectorXd::Zero(2), {}});
}

BuiltSystem build_paper_particle(const ParameterMap&) {
  auto split = paper_particle_split(paper_particle_system(0.0));
  HorizontalSymmetryModel horizontal(split, {0}, validation_points(3));
  return BuiltSystem{split.system(), std::move(split), std::move(horizontal), state({0, 0, 0}, {1, 0})};
}

BuiltSystem build_broken_demo(const ParameterMap& p) {
  ConstrainedSystem sys = paper_particle_system(p.at("epsilon"));
  sys = sys.with_lagrangian("broken-demo", sys.lagrangian());
  auto split = paper_particle_split(sys);
  return BuiltSystem{std::move(sys), std::move(split), std::nullopt, state({0, 0, 0}, {1, 0})};
}

// L = 1/2 |u|^2 on R^3, constraint zdot = x ydot.
BuiltSystem build_nonholonomic_particle(const ParameterMap&) {
  auto lag = make_scalar_on_tq(3, [](auto, auto u) { return 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); });
  Frame frame({coordinate_field(3, 0, "x"),
               make_vector_field(3, "y",
                                 [](auto x, auto out) {
                                   out[1] = 1.0;
                                   out[2] = x[0];
                                 }),
               coordinate_field(3, 2, "z")});
  ConstrainedSystem sys("nonholonomic-particle", {"x", "y", "z"}, std::move(lag), AdaptedFrame(std::move(frame), 2),
                        {1});
  // X_y = E~_y + x E~_z, X_z = E~_z
  auto coeffs = make_chart_function(3, 4, [](auto x, auto out) {
    out[0] = 1.0;
    out[1] = x[0];
    out[3] = 1.0;
  });
  InvariantFrameSplit split(sys, translations(3, {1, 2}, {"y", "z"}), SplitBlocks{{1}, {0}, {2}, {}},
                            std::move(coeffs), Trivialization{{0}, {1, 2}, Eigen::VectorXd::Zero(2), {}});
  return BuiltSystem{std::move(sys), std::move(split), std::nullopt, state({0.5, 0, 0}, {1, 0.5})};
}

// Knife edge at (x, y) on a body with its centre of mass a ahead of the
// contact point. Frame is left-invariant on SE(2); the group acts on the left.
BuiltSystem build_chaplygin_sleigh(const ParameterMap& p) {
  const double m = p.at("m"), inertia = p.at("I"), a = p.at("a");
  auto lag = make_scalar_on_tq(3, [m, inertia, a](auto x, auto u) {
    const auto s = sin(x[2]);
    const auto c = cos(x[2]);
    const auto vx = u[0] - a * u[2] * s;
    const auto vy = u[1] + a * u[2] * c;
    return 0.5 * m * (vx * vx + vy * vy) + 0.5 * inertia * u[2] * u[2];
  });
  Frame frame({coordinate_field(3, 2, "omega"),
               make_vector_field(3, "long",
                                 [](auto x, auto out) {
                                   out[0] = cos(x[2]);
                                   out[1] = sin(x[2]);
                                 }),
               make_vector_field(3, "lat", [](auto x, auto out) {
                 out[0] = -sin(x[2]);
                 out[1] = cos(x[2]);
               })});
  ConstrainedSystem sys("chaplygin-sleigh", {"x", "y", "theta"}, std::move(lag), AdaptedFrame(std::move(frame), 2),
                        {0, 1});

  // se(2) basis (theta, x, y): right-invariant fields on the chart.
  std::vector<VectorField> fund{make_vector_field(3, "theta",
                                                  [](auto x, auto out) {
                                                    out[0] = -x[1];
                                                    out[1] = x[0];
                                                    out[2] = 1.0;
                                                  }),
                                coordinate_field(3, 0, "x"), coordinate_field(3, 1, "y")};
  Tensor3 c(3, 3, 3);
  c(2, 0, 1) = 1.0;
  c(2, 1, 0) = -1.0;
  c(1, 0, 2) = -1.0;
  c(1, 2, 0) = 1.0;
  // X_omega = E~_theta + y E~_x - x E~_y, X_long and X_lat rotate E~_x, E~_y.
  auto coeffs = make_chart_function(3, 9, [](auto x, auto out) {
    out[0] = 1.0;
    out[1] = x[1];
    out[2] = -x[0];
    out[4] = cos(x[2]);
    out[5] = sin(x[2]);
    out[7] = -sin(x[2]);
    out[8] = cos(x[2]);
  });
  InvariantFrameSplit split(sys, GroupModel(std::move(fund), c), SplitBlocks{{0, 1}, {}, {2}, {}}, std::move(coeffs),
                            Trivialization{{}, {2, 0, 1}, Eigen::VectorXd::Zero(3), {}});
  return BuiltSystem{std::move(sys), std::move(split), std::nullopt, state({0, 0, 0}, {0.3, 1.0})};
}

// Upright disk of radius R rolling without slipping; theta is the rolling
// angle, phi the heading. Translations act freely and D is complementary to them.
BuiltSystem build_vertical_rolling_disk(const ParameterMap& p) {
  const double m = p.at("m"), inertia = p.at("I"), spin = p.at("J"), radius = p.at("R");
  auto lag = make_scalar_on_tq(4, [m, inertia, spin](auto, auto u) {
    return 0.5 * m * (u[0] * u[0] + u[1] * u[1]) + 0.5 * inertia * u[2] * u[2] + 0.5 * spin * u[3] * u[3];
  });
  Frame frame({make_vector_field(4, "theta",
                                 [radius](auto x, auto out) {
                                   out[0] = radius * cos(x[3]);
                                   out[1] = radius * sin(x[3]);
                                   out[2] = 1.0;
                                 }),
               coordinate_field(4, 3, "phi"), coordinate_field(4, 0, "x"), coordinate_field(4, 1, "y")});
  ConstrainedSystem sys("vertical-rolling-disk", {"x", "y", "theta", "phi"}, std::move(lag),
                        AdaptedFrame(std::move(frame), 2), {1});
  InvariantFrameSplit split(sys, translations(4, {0, 1}, {"x", "y"}), SplitBlocks{{}, {0, 1}, {2, 3}, {}},
                            identity_coefficients(4, 2),
                            Trivialization{{2, 3}, {0, 1}, Eigen::VectorXd::Zero(2), {}});
  return BuiltSystem{std::move(sys), std::move(split), std::nullopt, state({0, 0, 0, 0}, {1.0, 0.5})};
}

BuiltSystem build_free_particle(const ParameterMap& p) {
  const double m = p.at("m");
  auto lag = make_scalar_on_tq(3, [m](auto, auto u) { return 0.5 * m * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); });
  Frame frame({coordinate_field(3, 0, "x"), coordinate_field(3, 1, "y"), coordinate_field(3, 2, "z")});
  ConstrainedSystem sys("free-particle", {"x", "y", "z"}, std::move(lag), AdaptedFrame(std::move(frame), 3), {1, 2});
  InvariantFrameSplit split(sys, translations(3, {1, 2}, {"y", "z"}), SplitBlocks{{1, 2}, {0}, {}, {}},
                            identity_coefficients(3, 2), Trivialization{{0}, {1, 2}, Eigen::VectorXd::Zero(2), {}});
  HorizontalSymmetryModel horizontal(split, {0, 1}, validation_points(3));
  return BuiltSystem{std::move(sys), std::move(split), std::move(horizontal), state({0, 0, 0}, {1.0, 0.5, -0.25})};
}

std::vector<SystemSpec> make_zoo() {
  std::vector<SystemSpec> z;
  z.push_back({"paper-particle", "L = |u|^2/2 on R^3 with zdot = x xdot; G = R^2 (y, z), y horizontal", {},
               build_paper_particle});
  z.push_back({"nonholonomic-particle", "L = |u|^2/2 on R^3 with zdot = x ydot; G = R^2 (y, z)", {},
               build_nonholonomic_particle});
  z.push_back({"chaplygin-sleigh",
               "knife-edge body on SE(2); D inside the group directions",
               {{"m", 1.0, "kg", "mass"},
                {"I", 0.5, "kg m^2", "moment of inertia about the centre of mass"},
                {"a", 0.5, "m", "distance from contact point to centre of mass"}},
               build_chaplygin_sleigh});
  z.push_back({"vertical-rolling-disk",
               "upright disk rolling on the plane; G = R^2 translations, D complementary",
               {{"m", 1.0, "kg", "mass"},
                {"I", 0.5, "kg m^2", "moment of inertia about the axle"},
                {"J", 0.25, "kg m^2", "moment of inertia about the vertical"},
                {"R", 1.0, "m", "radius"}},
               build_vertical_rolling_disk});
  z.push_back({"free-particle", "unconstrained particle on R^3; G = R^2 (y, z)", {{"m", 1.0, "kg", "mass"}},
               build_free_particle});
  z.push_back({"broken-demo", "paper-particle plus the potential -epsilon y, which breaks the y symmetry",
               {{"epsilon", 1.0, "N", "slope of the symmetry-breaking potential", false}}, build_broken_demo});
  return z;
}

}  // namespace

const std::vector<SystemSpec>& zoo() {
  static const std::vector<SystemSpec> systems = make_zoo();
  return systems;
}

const SystemSpec* find_system(std::string_view name) {
  for (const auto& s : zoo())
    if (s.name == name) return &s;
  return nullptr;
}

std::string system_names() {
  std::string out;
  for (const auto& s : zoo()) {
    if (!out.empty()) out += ", ";
    out += s.name;
  }
  return out;
}

ParameterMap resolve_parameters(const SystemSpec& spec, const ParameterMap& overrides) {
  ParameterMap out;
  for (const auto& p : spec.parameters) out[p.name] = p.default_value;
  for (const auto& [name, value] : overrides) {
    const auto it = std::find_if(spec.parameters.begin(), spec.parameters.end(),
                                 [&](const Parameter& p) { return p.name == name; });
    if (it == spec.parameters.end()) {
      throw ConfigError("system '" + spec.name + "' has no parameter '" + name + "'");
    }
    if (!std::isfinite(value) || (it->positive && !(value > 0.0))) {
      throw ConfigError("parameter '" + name + "' must be " + (it->positive ? "positive" : "finite"));
    }
    out[name] = value;
  }
  return out;
}

BuiltSystem build_system(const SystemSpec& spec, const ParameterMap& overrides) {
  return spec.builder(resolve_parameters(spec, overrides));
}

std::vector<std::string> velocity_labels(const ConstrainedSystem& sys) {
  std::vector<std::string> out;
  for (int a = 0; a < sys.rank(); ++a) out.push_back(sys.frame().field(a).label());
  return out;
}

}  // namespace anholonome

#include "lrnr/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "lrnr/errors.hpp"

namespace lrnr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double piece_speed(const ExtendedInitialData& ext, const UhatPiece& p, double z) {
  if (!p.fan) return ext.flux->fp(p.value);
  const double s = std::clamp((z - p.a) / (p.b - p.a), 0.0, 1.0);
  return p.nu_minus + (p.nu_plus - p.nu_minus) * s;
}

double piece_value(const ExtendedInitialData& ext, const UhatPiece& p, double z) {
  if (!p.fan) return p.value;
  return ext.flux->fprime_inverse(piece_speed(ext, p, z));
}

}  // namespace

ExtendedInitialData extend_initial(const PiecewiseConstantFn& u0, FluxPtr flux) {
  const auto& bp = u0.breakpoints();
  const auto& v = u0.values();
  for (double x : v)
    if (!std::isfinite(x)) throw NotAdmissible("initial data has non-finite values");
  for (double b : bp)
    if (!std::isfinite(b)) throw NotAdmissible("initial data has non-finite breakpoints");
  ExtendedInitialData ext;
  ext.u0 = u0;
  ext.flux = std::move(flux);
  const double lo = ext.dom_x.lo, hi = ext.dom_x.hi;
  if (v.front() != 0.0 || v.back() != 0.0) throw NotAdmissible("initial data must vanish outside its support");
  if (!bp.empty() && (bp.front() < lo || bp.back() > hi))
    throw NotAdmissible("initial data must be supported in the unit interval");

  std::vector<double> ik, iv;
  auto push_knot = [&](double z, double val) {
    if (!ik.empty() && std::abs(ik.back() - z) <= 1e-15 * (1.0 + std::abs(z))) return;
    ik.push_back(z);
    iv.push_back(val);
  };
  double z = 0.0;
  push_knot(0.0, lo);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double pa = j == 0 ? lo : std::max(bp[j - 1], lo);
    const double pb = j == bp.size() ? hi : std::min(bp[j], hi);
    if (pb > pa) {
      ext.pieces.push_back(UhatPiece{z, z + (pb - pa), false, v[j], 0.0, 0.0, 0.0});
      z += pb - pa;
      push_knot(z, pb);
    }
    if (j < bp.size() && v[j + 1] > v[j]) {
      const double w = v[j + 1] - v[j];
      UhatPiece fan{z, z + w, true, 0.0, bp[j], ext.flux->fp(v[j]), ext.flux->fp(v[j + 1])};
      ext.pieces.push_back(fan);
      ext.fan_origins.push_back(bp[j]);
      ext.fan_widths.push_back(w);
      ext.gammas.emplace_back(z, z + w);
      ext.nu_minus.push_back(fan.nu_minus);
      ext.nu_plus.push_back(fan.nu_plus);
      z += w;
      push_knot(z, bp[j]);
    }
  }
  ext.ext_dom = Interval(0.0, z);
  ext.i_hat = PiecewiseLinearFn(ik, iv);
  return ext;
}

double ExtendedInitialData::iota(double x) const {
  double s = x;
  for (std::size_t k = 0; k < fan_origins.size(); ++k)
    if (fan_origins[k] < x) s += fan_widths[k];
  return s;
}

std::size_t ExtendedInitialData::piece_at(double z, Side side) const {
  if (side == Side::Left) {
    auto it = std::lower_bound(pieces.begin(), pieces.end(), z, [](const UhatPiece& p, double q) { return p.b < q; });
    if (it == pieces.end()) return pieces.size() - 1;
    return static_cast<std::size_t>(it - pieces.begin());
  }
  auto it = std::upper_bound(pieces.begin(), pieces.end(), z, [](double q, const UhatPiece& p) { return q < p.a; });
  if (it == pieces.begin()) return 0;
  return static_cast<std::size_t>(it - pieces.begin()) - 1;
}

double ExtendedInitialData::uhat(double z, Side side) const {
  return piece_value(*this, pieces[piece_at(z, side)], z);
}

double ExtendedInitialData::speed(double z, Side side) const {
  return piece_speed(*this, pieces[piece_at(z, side)], z);
}

double ExtendedInitialData::xhat0(double z, double t, Side side) const {
  if (!ext_dom.contains(z, 1e-12 * (1.0 + length()))) throw OutOfDomain("point outside the extended domain");
  return i_hat(z) + t * speed(z, side);
}

std::vector<double> ExtendedInitialData::knots() const {
  std::vector<double> k{ext_dom.lo};
  for (const auto& p : pieces) k.push_back(p.b);
  return k;
}

std::vector<double> ExtendedInitialData::jump_images() const {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const auto& l = pieces[i];
    const auto& r = pieces[i + 1];
    if (!l.fan && !r.fan && r.value < l.value) out.push_back(l.b);
  }
  return out;
}

double shock_time(const ExtendedInitialData& ext, const LaxOleinikOracle& oracle, double z, double tol_t) {
  const double T = oracle.T();
  const double foot = ext.foot(z), sp = ext.speed(z);
  if (oracle.alive(foot, sp, T)) return T + 1.0;
  double lo = 0.0, hi = T;
  while (hi - lo > tol_t) {
    const double m = 0.5 * (lo + hi);
    if (oracle.alive(foot, sp, m))
      lo = m;
    else
      hi = m;
  }
  return hi;
}

bool ShockTimeTable::in_shock(const ExtendedInitialData& ext, double z, double t) const {
  if (t <= 0.0) return false;
  return !oracle->alive(ext.foot(z), ext.speed(z), t);
}

double ShockTimeTable::lambda(const ExtendedInitialData& ext, double z) const {
  return shock_time(ext, *oracle, z, tol_t);
}

ShockTimeTable build_shock_table(const ExtendedInitialData& ext, std::shared_ptr<const LaxOleinikOracle> oracle,
                                 int n_grid) {
  if (n_grid < 2) throw OutOfRange("n_grid must be at least 2");
  ShockTimeTable tab;
  tab.T = oracle->T();
  tab.tol_t = tab.T * 1e-8;
  tab.sentinel = tab.T + 1.0;
  tab.oracle = std::move(oracle);
  std::vector<double> g = ext.knots();
  for (const auto& gam : ext.gammas)
    for (int i = 1; i < 8; ++i) g.push_back(gam.lo + gam.length() * i / 8.0);
  for (int i = 0; i <= n_grid; ++i) g.push_back(ext.ext_dom.lo + ext.length() * i / n_grid);
  std::sort(g.begin(), g.end());
  const double tol = 1e-13 * (1.0 + ext.length());
  for (double z : g)
    if (tab.grid.empty() || z - tab.grid.back() > tol) tab.grid.push_back(z);
  // jump images must be represented exactly
  for (double j : ext.jump_images()) {
    auto it = std::lower_bound(tab.grid.begin(), tab.grid.end(), j - tol);
    if (it != tab.grid.end() && std::abs(*it - j) <= tol) *it = j;
  }
  tab.lambda_vals.resize(tab.grid.size());
  for (std::size_t i = 0; i < tab.grid.size(); ++i)
    tab.lambda_vals[i] = shock_time(ext, *tab.oracle, tab.grid[i], tab.tol_t);
  return tab;
}

XhatSlice::XhatSlice(const ExtendedInitialData& ext, const ShockTimeTable& table, double t) : ext_(&ext), t_(t) {
  if (t < 0.0 || t > table.T * (1.0 + 1e-12)) throw HorizonExceeded("slice time outside [0,T]");
  const double L = ext.length();
  const double tol_z = 1e-13 * (1.0 + L);
  auto dead = [&](double z) { return table.in_shock(ext, z, t); };
  // bisect between an alive point a and a dead point d; returns the alive-side limit
  auto boundary = [&](double a, double d) {
    while (std::abs(d - a) > tol_z) {
      const double m = 0.5 * (a + d);
      if (dead(m))
        d = m;
      else
        a = m;
    }
    return a;
  };

  if (t > 0.0) {
    const auto& g = table.grid;
    const std::size_t n = g.size();
    std::vector<char> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = table.lambda_vals[i] <= t;
    // reconcile table membership with the direct predicate near the level t
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(table.lambda_vals[i] - t) <= 4.0 * table.tol_t) d[i] = dead(g[i]);

    // classify an ordered point list, then emit components with bisected ends
    auto emit = [&](const std::vector<double>& pts, const std::vector<char>& dd, std::vector<ShockComponent>& out) {
      std::size_t i = 0;
      while (i < pts.size()) {
        if (!dd[i]) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j + 1 < pts.size() && dd[j + 1]) ++j;
        ShockComponent c;
        c.lo = i == 0 ? pts[0] : boundary(pts[i - 1], pts[i]);
        c.hi = j + 1 == pts.size() ? pts[j] : boundary(pts[j + 1], pts[j]);
        out.push_back(c);
        i = j + 1;
      }
    };
    std::vector<ShockComponent> raw;
    emit(g, d, raw);

    // split runs that hide an alive gap between grid points
    const double gap_tol = 1e-8 * (1.0 + L);
    for (const auto& c : raw) {
      const double vlo = ext.xhat0(c.lo, t, Side::Left), vhi = ext.xhat0(c.hi, t, Side::Right);
      if (std::abs(vlo - vhi) <= gap_tol || c.lo == g.front() || c.hi == g.back()) {
        comps_.push_back(c);
        continue;
      }
      std::vector<double> pts{c.lo};
      for (double z : g)
        if (z > c.lo && z < c.hi) pts.push_back(z);
      const std::size_t base = pts.size();
      for (std::size_t i = 0; i + 1 < base; ++i)
        for (int s = 1; s < 64; ++s) pts.push_back(pts[i] + (pts[i + 1] - pts[i]) * s / 64.0);
      for (int s = 1; s < 64; ++s) pts.push_back(pts[base - 1] + (c.hi - pts[base - 1]) * s / 64.0);
      pts.push_back(c.hi);
      std::sort(pts.begin(), pts.end());
      std::vector<char> dd(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i)
        dd[i] = (i == 0 || i + 1 == pts.size()) ? 0 : static_cast<char>(dead(pts[i]));
      std::vector<ShockComponent> sub;
      emit(pts, dd, sub);
      comps_.insert(comps_.end(), sub.begin(), sub.end());
    }
    for (auto& c : comps_) {
      if (c.lo == g.front())
        c.value = ext.xhat0(c.hi, t, Side::Right);
      else
        c.value = ext.xhat0(c.lo, t, Side::Left);
    }
  }

  // exact profile: Xhat0 off the shock set, constant on each component
  std::vector<double> ks;
  for (double z : ext.knots())
    if (!find(z) || std::any_of(comps_.begin(), comps_.end(), [&](const ShockComponent& c) {
          return z == c.lo || z == c.hi;
        }))
      ks.push_back(z);
  for (const auto& c : comps_) {
    ks.push_back(c.lo);
    ks.push_back(c.hi);
  }
  std::sort(ks.begin(), ks.end());
  std::vector<double> kx, kv;
  for (double z : ks) {
    if (!kx.empty() && z - kx.back() <= tol_z) continue;
    const ShockComponent* c = find(z);
    double v = c ? c->value : ext.xhat0(z, t);
    if (!kv.empty() && v < kv.back()) {
      if (kv.back() - v > 1e-9 * (1.0 + L)) throw NotMonotone("rarefied characteristics lost monotonicity");
      v = kv.back();
    }
    kx.push_back(z);
    kv.push_back(v);
  }
  profile_ = PiecewiseLinearFn(kx, kv);
  inv_ = std::make_unique<MonotoneInverse>(profile_);
}

const ShockComponent* XhatSlice::find(double z) const {
  auto it = std::lower_bound(comps_.begin(), comps_.end(), z, [](const ShockComponent& c, double q) { return c.hi < q; });
  if (it != comps_.end() && z >= it->lo && z <= it->hi) return &*it;
  return nullptr;
}

double XhatSlice::inverse(double x) const {
  const auto& v = profile_.values();
  if (x <= v.front()) return profile_.knots().front();
  if (x >= v.back()) {
    // leftmost point of the terminal plateau
    std::size_t j = v.size() - 1;
    while (j > 0 && v[j - 1] >= v.back()) --j;
    return profile_.knots()[j];
  }
  return (*inv_)(x);
}

double XhatSlice::entropy(double x) const { return ext_->uhat(inverse(x), Side::Left); }

std::vector<ReliefSegment> XhatSlice::relief_segments(double c_x) const {
  const auto& ext = *ext_;
  if (c_x < ext.length()) throw InvalidCx("relief shift must be at least the extended domain length");
  std::vector<double> cuts = ext.knots();
  for (const auto& c : comps_) {
    cuts.push_back(c.lo);
    cuts.push_back(c.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<ReliefSegment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double m = 0.5 * (a + b);
    const ShockComponent* c = find(m);
    const bool lifted = c && m > c->lo && m < c->hi;
    const double shift = lifted ? c_x : 0.0;
    segs.push_back(ReliefSegment{a, b, ext.xhat0(a, t_, Side::Right) + shift, ext.xhat0(b, t_, Side::Left) + shift});
  }
  return segs;
}

double XhatSlice::relief(const std::vector<ReliefSegment>& segs, double x) const {
  for (const auto& s : segs) {
    const double lo = std::min(s.va, s.vb), hi = std::max(s.va, s.vb);
    if (x < lo || x > hi) continue;
    if (s.vb == s.va) return ext_->uhat(s.za, Side::Right);
    const double z = s.za + (x - s.va) / (s.vb - s.va) * (s.zb - s.za);
    return ext_->uhat(z, z <= s.za ? Side::Right : Side::Left);
  }
  const double zend = x < segs.front().va ? ext_->ext_dom.lo : ext_->ext_dom.hi;
  return ext_->uhat(zend, Side::Point);
}

std::pair<double, double> endpoints(const ExtendedInitialData& ext, const ShockTimeTable& table, double z, double t) {
  if (!table.in_shock(ext, z, t)) throw NotInShock("point is not in the shock set at this time");
  XhatSlice s(ext, table, t);
  const ShockComponent* c = s.find(z);
  if (!c) {
    // z sits inside a component but within bisection tolerance of its end
    double best = kInf;
    for (const auto& cc : s.components()) {
      const double d = std::min(std::abs(cc.lo - z), std::abs(cc.hi - z));
      if (d < best) {
        best = d;
        c = &cc;
      }
    }
    if (!c) throw NotInShock("no shock component found");
  }
  return {c->lo, c->hi};
}

double xhat(const ExtendedInitialData& ext, const ShockTimeTable& table, double z, double t) {
  if (!ext.ext_dom.contains(z, 1e-12 * (1.0 + ext.length()))) throw OutOfDomain("point outside the extended domain");
  if (!table.in_shock(ext, z, t)) return ext.xhat0(z, t);
  const auto [lo, hi] = endpoints(ext, table, z, t);
  (void)hi;
  return ext.xhat0(lo, t, Side::Left);
}

double entropy_eval(const ExtendedInitialData& ext, const ShockTimeTable& table, double x, double t) {
  if (!ext.dom_x.contains(x)) throw OutOfDomain("point outside the spatial domain");
  return XhatSlice(ext, table, t).entropy(x);
}

double relief_eval(const ExtendedInitialData& ext, const ShockTimeTable& table, double x, double t, double c_x) {
  if (!ext.dom_x.contains(x)) throw OutOfDomain("point outside the spatial domain");
  if (c_x < ext.length()) throw InvalidCx("relief shift must be at least the extended domain length");
  return XhatSlice(ext, table, t).relief(x, c_x);
}

void to_json(nlohmann::json& j, const ExtendedInitialData& ext) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : ext.pieces) {
    nlohmann::json q{{"a", p.a}, {"b", p.b}, {"fan", p.fan}};
    if (p.fan) {
      q["origin"] = p.origin;
      q["nu_minus"] = p.nu_minus;
      q["nu_plus"] = p.nu_plus;
    } else {
      q["value"] = p.value;
    }
    pieces.push_back(q);
  }
  nlohmann::json gam = nlohmann::json::array();
  for (const auto& g : ext.gammas) gam.push_back({g.lo, g.hi});
  j = nlohmann::json{{"flux", ext.flux->name()},
                     {"dom_x", {ext.dom_x.lo, ext.dom_x.hi}},
                     {"ext_dom", {ext.ext_dom.lo, ext.ext_dom.hi}},
                     {"fan_origins", ext.fan_origins},
                     {"fan_widths", ext.fan_widths},
                     {"gammas", gam},
                     {"nu_minus", ext.nu_minus},
                     {"nu_plus", ext.nu_plus},
                     {"pieces", pieces},
                     {"i_hat", {{"kind", "p1"}, {"knots", ext.i_hat.knots()}, {"values", ext.i_hat.values()}}},
                     {"u0", {{"kind", "p0"}, {"knots", ext.u0.breakpoints()}, {"values", ext.u0.values()}}}};
}

void to_json(nlohmann::json& j, const ShockTimeTable& table) {
  j = nlohmann::json{{"T", table.T},
                     {"tol_t", table.tol_t},
                     {"sentinel", table.sentinel},
                     {"grid", table.grid},
                     {"lambda", table.lambda_vals}};
}

}  // namespace lrnr

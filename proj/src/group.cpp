#include "horoflow/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace horo {

namespace {

const cplx kO(0.0, 1.0);
constexpr double kArcTol = 1e-12;
constexpr double kMinMargin = 1e-3;

// sin of half the angle between two boundary points, from the unit pairs.
double sinHalfSeparation(const BoundaryPoint& a, const BoundaryPoint& b) {
  return std::abs(a.p() * b.q() - a.q() * b.p());
}

// ccw distance that treats a wrap just below 2pi as a tiny negative.
double signedCcw(double from, double to) {
  double d = ccwDistance(from, to);
  if (d > kTwoPi - 1e-9) d -= kTwoPi;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Region

Region::Region(const BoundaryPoint& start, const BoundaryPoint& end) : start_(start), end_(end) {
  double u1 = start.p(), u2 = start.q(), v1 = end.p(), v2 = end.q();
  double cross = u1 * v2 - u2 * v1;
  if (std::abs(cross) < 1e-15) throw ValidationError("region endpoints coincide");
  double s = cross > 0 ? 1.0 : -1.0;
  chart_ = MoebiusMap(s * u2, -s * u1, v2, -v1);
}

double Region::signedDistance(cplx z) const {
  cplx w = chart_.apply(z);
  return std::asinh(w.real() / w.imag());
}

bool Region::containsBoundaryPoint(const BoundaryPoint& xi, double tol) const {
  double len = arcLength();
  double d = ccwDistance(start_.angle(), xi.angle());
  if (d <= len + tol) return true;
  return d >= kTwoPi - tol;
}

double Region::distanceFromOrigin() const {
  if (signedDistance(kO) >= 0.0) return 0.0;
  double s = sinHalfSeparation(start_, end_);
  return std::acosh(1.0 / s);
}

// ---------------------------------------------------------------------------
// Words

GroupWord::GroupWord(std::vector<Letter> letters) {
  for (Letter l : letters) {
    if (!letters_.empty() && letters_.back() == inverseLetter(l))
      letters_.pop_back();
    else
      letters_.push_back(l);
  }
}

GroupWord GroupWord::operator*(const GroupWord& other) const {
  std::vector<Letter> all = letters_;
  all.insert(all.end(), other.letters_.begin(), other.letters_.end());
  return GroupWord(std::move(all));
}

GroupWord GroupWord::inverse() const {
  std::vector<Letter> inv(letters_.rbegin(), letters_.rend());
  for (Letter& l : inv) l = inverseLetter(l);
  GroupWord w;
  w.letters_ = std::move(inv);
  return w;
}

MoebiusMap GroupWord::evaluate(const FuchsianGroup& g) const {
  MoebiusMap m;
  for (Letter l : letters_) m = m * g.letter(l);
  return m;
}

std::string GroupWord::toString(const FuchsianGroup& g) const {
  if (letters_.empty()) return "e";
  std::string s;
  for (Letter l : letters_) s += g.letterName(l);
  return s;
}

// ---------------------------------------------------------------------------
// FuchsianGroup

bool FuchsianGroup::hasParabolics() const {
  return std::any_of(kinds_.begin(), kinds_.end(),
                     [](IsometryClass c) { return c == IsometryClass::Parabolic; });
}

std::string FuchsianGroup::letterName(Letter l) const {
  std::string n = spec_.generators[l / 2].name;
  if (l & 1)
    for (char& c : n) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return n;
}

bool FuchsianGroup::inDomain(cplx z, double tol) const { return !regionOf(z, tol).has_value(); }

std::optional<Letter> FuchsianGroup::regionOf(cplx z, double tol) const {
  for (std::size_t l = 0; l < regions_.size(); ++l)
    if (regions_[l].containsInterior(z, tol)) return static_cast<Letter>(l);
  return std::nullopt;
}

std::optional<Letter> FuchsianGroup::arcOf(const BoundaryPoint& xi) const {
  for (std::size_t l = 0; l < regions_.size(); ++l)
    if (regions_[l].containsBoundaryPoint(xi)) return static_cast<Letter>(l);
  return std::nullopt;
}

GroupWord FuchsianGroup::parseWord(const std::string& text) const {
  std::vector<Letter> out;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*' || ch == '.') continue;
    if (ch == 'e' && text.size() == 1) break;
    bool found = false;
    for (std::size_t l = 0; l < letterCount(); ++l) {
      if (letterName(static_cast<Letter>(l)) == std::string(1, ch)) {
        out.push_back(static_cast<Letter>(l));
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError(std::string("unknown letter '") + ch + "' in word");
  }
  return GroupWord(std::move(out));
}

// ---------------------------------------------------------------------------
// Certification

FuchsianGroup buildGroup(const GroupSpec& spec) {
  FuchsianGroup g;
  g.name_ = spec.name;
  g.spec_ = spec;
  std::size_t n = spec.generators.size();
  if (n > 100) throw ValidationError("too many generators");
  for (std::size_t k = 0; k < n; ++k) {
    const GeneratorSpec& gs = spec.generators[k];
    if (gs.name.size() != 1 || !std::islower(static_cast<unsigned char>(gs.name[0])))
      throw ValidationError("generator names must be single lowercase letters");
    IsometryClass cls = classify(gs.matrix);
    if (cls == IsometryClass::Identity || cls == IsometryClass::Elliptic)
      throw ValidationError("generator " + gs.name + " is " + enumName(cls));
    g.generators_.push_back(gs.matrix);
    g.kinds_.push_back(cls);
    g.letterMaps_.push_back(gs.matrix);
    g.letterMaps_.push_back(gs.matrix.inverse());
    g.regions_.push_back(gs.region);
    g.regions_.push_back(gs.inverseRegion);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (spec.generators[a].name == spec.generators[b].name)
        throw ValidationError("duplicate generator name " + spec.generators[a].name);

  Certificate cert;
  // Regions of distinct letters are disjoint, with a margin unless they are
  // the two regions of a parabolic generator touching at its fixed point.
  cert.minRegionMargin = kTwoPi;
  std::size_t L = g.regions_.size();
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t m = l + 1; m < L; ++m) {
      const Region& A = g.regions_[l];
      const Region& B = g.regions_[m];
      double gab = signedCcw(A.end().angle(), B.start().angle());
      double gba = signedCcw(B.end().angle(), A.start().angle());
      double total = A.arcLength() + B.arcLength() + gab + gba;
      if (std::abs(total - kTwoPi) > 1e-9 || gab < -kArcTol || gba < -kArcTol)
        throw ValidationError("region overlap between " + g.letterName(l) + " and " +
                              g.letterName(m));
      bool pair = (m == (l ^ 1)) && g.kinds_[l / 2] == IsometryClass::Parabolic;
      BoundaryPoint fix;
      if (pair) fix = fixedPoints(g.generators_[l / 2])[0].point;
      auto checkGap = [&](double gap, const BoundaryPoint& at) {
        if (gap >= kMinMargin) {
          cert.minRegionMargin = std::min(cert.minRegionMargin, gap);
          return;
        }
        if (pair && at.arcDistance(fix) < 1e-9) return;
        throw ValidationError("region overlap: " + g.letterName(l) + " and " + g.letterName(m) +
                              " are closer than the required margin");
      };
      checkGap(gab, A.end());
      checkGap(gba, B.end());
    }
  }

  // Ping-pong: letter x maps the complement of R_{x^-1} into R_x.
  cert.pingPongSlack = kTwoPi;
  for (std::size_t l = 0; l < L; ++l) {
    const Region& target = g.regions_[l];
    const Region& source = g.regions_[l ^ 1];
    const MoebiusMap& x = g.letterMaps_[l];
    BoundaryPoint i1 = x.apply(source.end());
    BoundaryPoint i2 = x.apply(source.start());
    double len = target.arcLength();
    double a = signedCcw(target.start().angle(), i1.angle());
    double b = signedCcw(target.start().angle(), i2.angle());
    double slack = std::min({a, b - a, len - b});
    if (slack < -kArcTol)
      throw ValidationError("ping-pong law violation for letter " + g.letterName(l));
    cert.pingPongSlack = std::min(cert.pingPongSlack, slack);
  }

  if (n < 2) throw ValidationError("elementary group: at least two generators are required");
  {
    std::vector<BoundaryPoint> fixes;
    for (const MoebiusMap& m : g.generators_)
      for (const FixedPoint& f : fixedPoints(m)) fixes.push_back(f.point);
    MoebiusMap prod = g.generators_[0] * g.generators_[1];
    if (classify(prod) != IsometryClass::Identity)
      for (const FixedPoint& f : fixedPoints(prod)) fixes.push_back(f.point);
    std::vector<BoundaryPoint> distinct;
    for (const BoundaryPoint& f : fixes)
      if (std::none_of(distinct.begin(), distinct.end(),
                       [&](const BoundaryPoint& q) { return q.arcDistance(f) < 1e-9; }))
        distinct.push_back(f);
    if (distinct.size() < 3) throw ValidationError("elementary group: fewer than three limit points");
    cert.limitPointsWitnessed = static_cast<int>(distinct.size());
  }

  g.children_.assign(L, {});
  for (std::size_t x = 0; x < L; ++x) {
    std::vector<std::pair<double, Letter>> kids;
    for (std::size_t y = 0; y < L; ++y) {
      if (y == (x ^ 1)) continue;
      BoundaryPoint s = g.letterMaps_[x].apply(g.regions_[y].start());
      double off = ccwDistance(g.regions_[x].start().angle(), s.angle());
      if (off > kTwoPi - 1e-9) off = 0.0;
      kids.push_back({off, static_cast<Letter>(y)});
    }
    std::sort(kids.begin(), kids.end());
    for (auto& k : kids) g.children_[x].push_back(k.second);
  }
  {
    std::vector<std::pair<double, Letter>> t;
    for (std::size_t x = 0; x < L; ++x) t.push_back({g.regions_[x].start().angle(), static_cast<Letter>(x)});
    std::sort(t.begin(), t.end());
    for (auto& q : t) g.top_.push_back(q.second);
  }

  if (g.regionOf(kO).has_value()) throw ValidationError("basepoint outside fundamental domain");

  // Parabolic generators need a seed horoball at their fixed point.
  g.seeds_ = spec.horoballSeeds;
  for (std::size_t k = 0; k < n; ++k) {
    if (g.kinds_[k] != IsometryClass::Parabolic) continue;
    BoundaryPoint fix = fixedPoints(g.generators_[k])[0].point;
    bool seeded = std::any_of(g.seeds_.begin(), g.seeds_.end(),
                              [&](const Horoball& h) { return h.base.arcDistance(fix) < 1e-9; });
    if (!seeded) throw ValidationError("parabolic without horoball seed: generator " +
                                       spec.generators[k].name);
  }
  for (const Horoball& h : g.seeds_) {
    if (h.contains(kO)) throw ValidationError("horoball seed contains the basepoint");
    bool cusp = false;
    for (std::size_t k = 0; k < n; ++k)
      if (g.kinds_[k] == IsometryClass::Parabolic &&
          fixedPoints(g.generators_[k])[0].point.arcDistance(h.base) < 1e-9)
        cusp = true;
    if (!cusp) throw ValidationError("horoball seed is not based at a parabolic fixed point");
  }
  g.cusps_.assign(L, {});
  for (const Horoball& hb : g.seeds_) {
    MoebiusMap chart = rotateToInfinity(hb.base);
    double h = std::exp(hb.level);  // chart fixes o, so Im(chart o) = 1
    for (std::size_t l = 0; l < L; ++l) {
      const Region& r = g.regions_[l];
      bool fixes = g.letterMaps_[l].apply(hb.base).arcDistance(hb.base) < 1e-12;
      if (fixes) {
        // The cusp is an endpoint of the arc of a stabilizing letter.
        FuchsianGroup::CuspBound cb;
        cb.chart = chart;
        cb.h = h;
        cb.shift = (chart * g.letterMaps_[l] * chart.inverse()).apply(cplx(0.0, 1.0)).real();
        if (r.end().arcDistance(hb.base) < 1e-9) {
          cb.a = chart.apply(r.start()).real();
          cb.side = 1.0;
          cb.active = true;
        } else if (r.start().arcDistance(hb.base) < 1e-9) {
          cb.a = chart.apply(r.end()).real();
          cb.side = -1.0;
          cb.active = true;
        }
        g.cusps_[l] = cb;
        continue;
      }
      // Other regions must stay below the horoball, so that no orbit point
      // enters it.
      BoundaryPoint s0 = chart.apply(r.start()), e0 = chart.apply(r.end());
      double a1 = s0.real(), a2 = e0.real();
      if (s0.isInfinity() || e0.isInfinity() || a1 >= a2 || 0.5 * (a2 - a1) >= h)
        throw ValidationError("horoball seed meets the region of letter " + g.letterName(static_cast<Letter>(l)));
    }
  }

  cert.minHoroballGap = 0.0;
  if (!g.seeds_.empty()) {
    g.cert_ = cert;
    std::vector<Horoball> fam = horoballFamily(g, std::max(spec.horoballDepth, 1));
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < fam.size(); ++a)
      for (std::size_t b = a + 1; b < fam.size(); ++b) {
        if (!horoballsDisjoint(fam[a], fam[b], 0.0))
          throw ValidationError("horoball overlap in the seed family");
        MoebiusMap rot = rotateToInfinity(fam[a].base);
        double r = rot.apply(fam[b].base).real();
        double diam = (r * r + 1.0) * std::exp(-fam[b].level);
        gap = std::min(gap, fam[a].level - std::log(diam));
      }
    cert.horoballsChecked = static_cast<int>(fam.size());
    cert.minHoroballGap = gap;
  }
  g.cert_ = cert;
  return g;
}

// ---------------------------------------------------------------------------
// Built-in groups

GroupSpec builtinSpec(const std::string& name) {
  auto R = BoundaryPoint::fromReal;
  const double inf = std::numeric_limits<double>::infinity();
  GroupSpec s;
  s.name = name;
  MoebiusMap b(5.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0);
  if (name == "schottky2") {
    s.generators.push_back({"a", MoebiusMap(3.0, 0.0, 0.0, 1.0 / 3.0), Region(R(3.6), R(-3.6)),
                            Region(R(-0.4), R(0.4))});
    s.generators.push_back({"b", b, Region(R(0.5), R(2.0)), Region(R(-2.0), R(-0.5))});
    return s;
  }
  if (name == "cusp1") {
    s.generators.push_back({"p", MoebiusMap(1.0, 6.0, 0.0, 1.0), Region(R(3.0), R(inf)),
                            Region(R(inf), R(-3.0))});
    s.generators.push_back({"h", b, Region(R(0.5), R(2.0)), Region(R(-2.0), R(-0.5))});
    s.horoballSeeds.push_back({BoundaryPoint::infinity(), std::log(2.0)});
    s.horoballDepth = 3;
    return s;
  }
  throw ValidationError("unknown built-in group '" + name + "'");
}

std::vector<std::string> builtinNames() { return {"schottky2", "cusp1"}; }

FuchsianGroup builtinGroup(const std::string& name) { return buildGroup(builtinSpec(name)); }

namespace {

double parseScalar(const nlohmann::json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ValidationError(std::string("expected a number for ") + what);
  std::string t = v.get<std::string>();
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }),
          t.end());
  if (t == "inf" || t == "+inf" || t == "-inf" || t == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t slash = t.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      double x = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return x;
    }
    std::string num = t.substr(0, slash), den = t.substr(slash + 1);
    double a = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(t);
    double b = std::stod(den, &used);
    if (used != den.size() || b == 0.0) throw std::invalid_argument(t);
    return a / b;
  } catch (const std::exception&) {
    throw ValidationError(std::string("cannot parse ") + what + " value '" + t + "'");
  }
}

Region parseRegion(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2) throw ValidationError("region must be a [start, end] pair");
  return Region(BoundaryPoint::fromReal(parseScalar(v[0], "region")),
                BoundaryPoint::fromReal(parseScalar(v[1], "region")));
}

}  // namespace

GroupSpec parseGroupSpec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("group spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("group spec must be a JSON object");
  GroupSpec s;
  s.name = j.value("name", std::string("custom"));
  if (!j.contains("generators") || !j["generators"].is_array())
    throw ValidationError("group spec needs a generators array");
  int k = 0;
  for (const auto& gj : j["generators"]) {
    GeneratorSpec gs;
    gs.name = gj.value("name", std::string(1, static_cast<char>('a' + k)));
    const auto& m = gj.at("matrix");
    if (!m.is_array() || m.size() != 4) throw ValidationError("matrix must have 4 entries");
    gs.matrix = MoebiusMap(parseScalar(m[0], "matrix"), parseScalar(m[1], "matrix"),
                           parseScalar(m[2], "matrix"), parseScalar(m[3], "matrix"));
    if (!gj.contains("region") || !gj.contains("inverse_region"))
      throw ValidationError("each generator needs region and inverse_region");
    gs.region = parseRegion(gj["region"]);
    gs.inverseRegion = parseRegion(gj["inverse_region"]);
    s.generators.push_back(gs);
    ++k;
  }
  if (j.contains("horoballs")) {
    for (const auto& hj : j["horoballs"]) {
      Horoball h;
      h.base = BoundaryPoint::fromReal(parseScalar(hj.at("base"), "horoball base"));
      h.level = parseScalar(hj.at("level"), "horoball level");
      s.horoballSeeds.push_back(h);
    }
  }
  s.horoballDepth = j.value("horoball_depth", 3);
  return s;
}

GroupSpec loadGroupSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open group spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseGroupSpec(ss.str());
}

FuchsianGroup resolveGroup(const std::string& nameOrPath) {
  for (const std::string& n : builtinNames())
    if (n == nameOrPath) return builtinGroup(n);
  return buildGroup(loadGroupSpec(nameOrPath));
}

// ---------------------------------------------------------------------------
// Orbits

double orbitDistance(const MoebiusMap& m) {
  double f = m.a() * m.a() + m.b() * m.b() + m.c() * m.c() + m.d() * m.d();
  return std::acosh(std::max(1.0, 0.5 * f));
}

double FuchsianGroup::subtreeDistance(const MoebiusMap& w, Letter x) const {
  const Region& r = regions_[x];
  double s = sinHalfSeparation(w.apply(r.start()), w.apply(r.end()));
  double d = s <= 0.0 ? std::numeric_limits<double>::infinity() : std::acosh(std::min(1.0 / s, 1e300));
  if (x >= cusps_.size() || !cusps_[x].active) return d;
  // Distance from w^-1 o to the quarter plane {side (Re - a) >= 0, Im <= h}.
  const CuspBound& c = cusps_[x];
  cplx z = c.chart.apply(w.inverse().apply(kO));
  double off = c.side * (c.a - z.real());  // > 0: outside the vertical half-plane
  double q;
  if (off <= 0.0) {
    q = std::max(0.0, std::log(z.imag() / c.h));
  } else {
    double foot = std::hypot(off, z.imag());
    q = foot <= c.h ? std::asinh(off / z.imag()) : distance(z, cplx(c.a, c.h));
  }
  return std::max(d, q);
}

void visitOrbit(const FuchsianGroup& g, const OrbitCutoff& cutoff, const OrbitVisitor& visit) {
  if (cutoff.maxWordLength < 0 && cutoff.maxDistance < 0)
    throw ValidationError("orbit enumeration needs a word-length or distance cutoff");
  const int nl = static_cast<int>(g.letterCount());
  struct Node {
    MoebiusMap m;
    int next;
  };
  std::vector<Node> stack{{MoebiusMap(), 0}};
  std::vector<Letter> word;
  visit(std::span<const Letter>(word), stack.back().m, 0.0);
  while (!stack.empty()) {
    Node& top = stack.back();
    if (top.next >= nl ||
        (cutoff.maxWordLength >= 0 && static_cast<int>(word.size()) >= cutoff.maxWordLength)) {
      stack.pop_back();
      if (!word.empty()) word.pop_back();
      continue;
    }
    Letter x = static_cast<Letter>(top.next++);
    if (!word.empty() && x == inverseLetter(word.back())) continue;
    if (cutoff.maxDistance >= 0) {
      if (g.subtreeDistance(top.m, x) > cutoff.maxDistance) continue;
    }
    MoebiusMap child = top.m * g.letter(x);
    double d = orbitDistance(child);
    stack.push_back({child, 0});
    word.push_back(x);
    if (cutoff.maxDistance < 0 || d <= cutoff.maxDistance)
      visit(std::span<const Letter>(word), child, d);
  }
}

std::vector<OrbitPoint> enumerateOrbit(const FuchsianGroup& g, const OrbitCutoff& cutoff) {
  std::vector<OrbitPoint> out;
  visitOrbit(g, cutoff, [&](std::span<const Letter> w, const MoebiusMap& m, double d) {
    OrbitPoint p;
    p.word = GroupWord(std::vector<Letter>(w.begin(), w.end()));
    p.image = PlanePoint::halfPlane(basePoint(m));
    p.dist = d;
    out.push_back(std::move(p));
  });
  std::stable_sort(out.begin(), out.end(), [](const OrbitPoint& a, const OrbitPoint& b) {
    return a.word.length() < b.word.length();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reduction

std::pair<PlanePoint, GroupWord> reducePoint(const PlanePoint& x, const FuchsianGroup& g,
                                             int budget) {
  cplx z = x.inHalfPlane();
  std::vector<Letter> applied;  // letters applied, in order
  for (int step = 0;; ++step) {
    auto l = g.regionOf(z);
    if (!l) break;
    if (step >= budget) throw BudgetError("reduction step budget exhausted");
    Letter inv = inverseLetter(*l);
    z = g.letter(inv).apply(z);
    applied.push_back(inv);
  }
  // rep = a_k ... a_1 x
  GroupWord w(std::vector<Letter>(applied.rbegin(), applied.rend()));
  PlanePoint rep = PlanePoint::halfPlane(z);
  if (x.model() == Model::Disc) rep = PlanePoint::disc(rep.inDisc());
  return {rep, w};
}

std::pair<MoebiusMap, GroupWord> reduceFrame(const MoebiusMap& m, const FuchsianGroup& g,
                                             int budget) {
  MoebiusMap r = m;
  std::vector<Letter> applied;
  for (int step = 0;; ++step) {
    auto l = g.regionOf(basePoint(r));
    if (!l) break;
    if (step >= budget) throw BudgetError("reduction step budget exhausted");
    Letter inv = inverseLetter(*l);
    r = g.letter(inv) * r;
    applied.push_back(inv);
  }
  r = MoebiusMap(r.a(), r.b(), r.c(), r.d());
  return {r, GroupWord(std::vector<Letter>(applied.rbegin(), applied.rend()))};
}

QuotientFrame reduceFrame(const HopfFrame& f, const FuchsianGroup& g, int budget) {
  auto [m, w] = reduceFrame(frameToMatrix(f), g, budget);
  HopfFrame rep = matrixToFrame(m);
  // Keep tau exact when no reduction happened.
  if (w.empty()) rep = f;
  return {rep, w};
}

int FuchsianGroup::parabolicRun(Letter x, cplx z) const {
  if (x >= cusps_.size() || !cusps_[x].active) return 1;
  const CuspBound& c = cusps_[x];
  double off = c.side * (c.chart.apply(z).real() - c.a);
  double step = std::abs(c.shift);
  if (!(off > 0.0) || !(step > 0.0)) return 1;
  // Stop on the boundary line, as the interior test does.
  return static_cast<int>(std::clamp(std::ceil(off / step - 1e-9), 1.0, 1e9));
}

MoebiusMap FuchsianGroup::letterPower(Letter x, int n) const {
  if (n == 1) return letterMaps_[x];
  if (x < cusps_.size() && cusps_[x].active) {
    const CuspBound& c = cusps_[x];
    return c.chart.inverse() * MoebiusMap(1.0, n * c.shift, 0.0, 1.0) * c.chart;
  }
  MoebiusMap r;
  for (int k = 0; k < n; ++k) r = letterMaps_[x] * r;
  return r;
}

int reduceFrameInPlace(MoebiusMap& m, const FuchsianGroup& g, int budget) {
  int steps = 0;
  for (int iter = 0;; ++iter) {
    cplx z = basePoint(m);
    auto l = g.regionOf(z);
    if (!l) break;
    if (iter >= budget) throw BudgetError("reduction step budget exhausted");
    int n = g.parabolicRun(*l, z);
    m = g.letterPower(inverseLetter(*l), n) * m;
    steps += n;
  }
  if (steps > 0) m = MoebiusMap(m.a(), m.b(), m.c(), m.d());
  return steps;
}

std::vector<Horoball> horoballFamily(const FuchsianGroup& g, int depth) {
  if (g.horoballSeeds().empty()) throw DomainError("no parabolic: the group has no horoball seeds");
  std::vector<Horoball> out;
  for (const Horoball& seed : g.horoballSeeds()) {
    std::vector<bool> fixes(g.letterCount());
    for (std::size_t l = 0; l < g.letterCount(); ++l)
      fixes[l] = g.letter(static_cast<Letter>(l)).apply(seed.base).arcDistance(seed.base) < 1e-12;
    for (const OrbitPoint& p : enumerateOrbit(g, OrbitCutoff::length(depth))) {
      const auto& w = p.word.letters();
      if (!w.empty() && fixes[w.back()]) continue;
      out.push_back(seed.image(p.word.evaluate(g)));
    }
  }
  return out;
}

}  // namespace horo

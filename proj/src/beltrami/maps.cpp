#include "beltrami/maps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "beltrami/error.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

AutonomousMap::AutonomousMap(std::function<cplx(cplx)> eval, double k, std::optional<LinearAtInfinity> linf,
                             std::string name)
    : eval_(std::move(eval)), k_(k), linf_(linf), name_(std::move(name)) {
  if (!eval_) throw Error(ErrorCode::InvalidArgument, "autonomous map needs an evaluation function");
  if (!(k_ >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be >= 0");
}

AutonomousMap AutonomousMap::linear(cplx a, cplx b) {
  return {[a, b](cplx z) { return a * z + b * std::conj(z); }, std::abs(a) + std::abs(b),
          LinearAtInfinity{a, b, 0.0, 0.0}, "linear"};
}

AutonomousMap AutonomousMap::abs(double k) {
  return {[k](cplx z) { return cplx(k * std::abs(z), 0.0); }, k, std::nullopt, "kabs"};
}

// s zeta / (1 + |zeta|) is s-Lipschitz with its steepest slope at the origin.
AutonomousMap AutonomousMap::smooth_saturating(cplx a, cplx b, double s) {
  return {[a, b, s](cplx z) { return a * z + b * std::conj(z) + s * z / (1.0 + std::abs(z)); },
          std::abs(a) + std::abs(b) + std::abs(s), LinearAtInfinity{a, b, 0.0, std::abs(s)}, "smoothsat"};
}

double estimate_lipschitz(const AutonomousMap& A, int samples, double radius, std::uint64_t seed) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "estimate_lipschitz requires samples >= 2");
  Rng rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const cplx z = rng.in_disk(radius);
    cplx w;
    if (s % 2 == 0) {
      w = rng.in_disk(radius);
    } else {
      const double eps = radius * 1e-6 * (0.5 + rng.uniform());
      w = z + std::polar(eps, 2.0 * std::numbers::pi * rng.uniform());
    }
    const double dz = std::abs(z - w);
    if (dz == 0.0) continue;
    best = std::max(best, std::abs(A(z) - A(w)) / dz);
  }
  return best;
}

LinearFit fit_linear_part(const AutonomousMap& A, const std::vector<double>& radii) {
  if (radii.size() < 3) throw Error(ErrorCode::InvalidArgument, "fit_linear_part needs at least 3 radii");
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "radii must be positive and increasing");
  if (radii.back() / radii.front() < 100.0)
    throw Error(ErrorCode::InvalidArgument, "radii must span at least two decades");

  constexpr int kAngles = 16;
  auto circle = [](double r, int j) { return std::polar(r, 2.0 * std::numbers::pi * (j + 0.25) / kAngles); };

  // Equispaced angles make z and conj(z) orthogonal, so the least-squares
  // coefficients decouple into two projections.
  LinearFit fit;
  const double R = radii.back();
  cplx pa{}, pb{};
  for (int j = 0; j < kAngles; ++j) {
    const cplx z = circle(R, j);
    const cplx v = A(z);
    pa += v * std::conj(z);
    pb += v * z;
  }
  fit.a = pa / (kAngles * R * R);
  fit.b = pb / (kAngles * R * R);

  for (double r : radii) {
    double e = 0.0;
    for (int j = 0; j < kAngles; ++j) {
      const cplx z = circle(r, j);
      e = std::max(e, std::abs(A(z) - fit.a * z - fit.b * std::conj(z)));
    }
    fit.remainder.push_back(e);
  }

  // log e = log C + alpha log r over the radii with nonzero remainder.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  const double floor = 1e-13 * R;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (fit.remainder[i] <= floor) continue;
    const double x = std::log(radii[i]), y = std::log(fit.remainder[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  fit.alpha = 0.0;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) fit.alpha = std::max(0.0, (m * sxy - sx * sy) / denom);
  }
  fit.C = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    fit.C = std::max(fit.C, fit.remainder[i] / (std::pow(radii[i], fit.alpha) + 1.0));

  const double rel_remainder = fit.remainder.back() / R;
  fit.ok = fit.alpha < 0.95 && rel_remainder < 0.1 && std::abs(fit.a) + std::abs(fit.b) < 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Grammar

namespace {

[[noreturn]] void bad_token(const std::string& tok, const std::string& why, const char* kind = "map") {
  throw Error(ErrorCode::MapGrammar, std::string("bad ") + kind + " token '" + tok + "': " + why);
}

std::vector<double> numbers(const std::string& tok, const std::string& body, std::size_t expected,
                            const char* kind = "map") {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = body.find(',', pos);
    const std::string piece = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(piece.c_str(), &end);
    if (piece.empty() || end != piece.c_str() + piece.size() || !std::isfinite(v))
      bad_token(tok, "cannot parse number '" + piece + "'", kind);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    bad_token(tok, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()), kind);
  return out;
}

// Splits at '+' that begins a new named token (an exponent '+' is followed by
// a digit).
std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> toks;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+' && i + 1 < text.size() && std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
      toks.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  toks.push_back(text.substr(start));
  return toks;
}

}  // namespace

MapSpec parse_map(const std::string& text) {
  const auto toks = split_tokens(text);
  auto split = [](const std::string& tok) -> std::pair<std::string, std::string> {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) bad_token(tok, "expected '<name>:<numbers>'");
    return {tok.substr(0, colon), tok.substr(colon + 1)};
  };

  const auto [name, body] = split(toks.front());
  std::optional<std::pair<cplx, cplx>> lin;
  auto base = [&]() -> AutonomousMap {
    if (name == "linear") {
      const auto v = numbers(toks.front(), body, 4);
      lin = std::pair{cplx(v[0], v[1]), cplx(v[2], v[3])};
      return AutonomousMap::linear(lin->first, lin->second);
    }
    if (name == "kabs") {
      const auto v = numbers(toks.front(), body, 1);
      if (v[0] < 0.0) bad_token(toks.front(), "k must be >= 0");
      return AutonomousMap::abs(v[0]);
    }
    if (name == "smoothsat") {
      const auto v = numbers(toks.front(), body, 5);
      return AutonomousMap::smooth_saturating({v[0], v[1]}, {v[2], v[3]}, v[4]);
    }
    bad_token(toks.front(), "unknown map '" + name + "' (expected linear, kabs or smoothsat)");
  }();

  MapSpec spec{text, std::move(base), {}, lin};
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto [tname, tbody] = split(toks[i]);
    if (tname == "zterm") {
      const auto v = numbers(toks[i], tbody, 3);
      if (v[1] != std::floor(v[1]) || v[2] != std::floor(v[2]))
        bad_token(toks[i], "wave numbers must be integers");
      spec.terms.push_back({MapTerm::Kind::ZTerm, v[0], static_cast<int>(v[1]), static_cast<int>(v[2])});
    } else if (tname == "wterm") {
      const auto v = numbers(toks[i], tbody, 1);
      spec.terms.push_back({MapTerm::Kind::WTerm, v[0], 0, 0});
    } else {
      bad_token(toks[i], "unknown term '" + tname + "' (expected zterm or wterm)");
    }
  }
  return spec;
}

GridField sample_forcing(const std::string& text, const GridSpec& spec) {
  constexpr const char* kind = "forcing";
  std::vector<cplx> v(spec.size());
  const double L = spec.period;
  for (const auto& tok : split_tokens(text)) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) bad_token(tok, "expected '<name>:<numbers>'", kind);
    const std::string name = tok.substr(0, colon), body = tok.substr(colon + 1);
    if (name == "mode") {
      const auto x = numbers(tok, body, 4, kind);
      if (x[2] != std::floor(x[2]) || x[3] != std::floor(x[3])) bad_token(tok, "wave numbers must be integers", kind);
      const TrigPolynomial w(L, {{static_cast<int>(x[2]), static_cast<int>(x[3]), cplx(x[0], x[1])}});
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += w(spec.point(k));
    } else if (name == "bump") {
      const auto x = numbers(tok, body, 3, kind);
      if (!(x[2] > 0.0)) bad_token(tok, "width must be > 0", kind);
      const cplx amp(x[0], x[1]);
      const double s2 = 2.0 * x[2] * x[2];
      for (std::size_t k = 0; k < v.size(); ++k) {
        const cplx z = spec.point(k);
        // nearest periodic image of the center (L/2, L/2)
        double dx = std::remainder(z.real() - 0.5 * L, L), dy = std::remainder(z.imag() - 0.5 * L, L);
        v[k] += amp * std::exp(-(dx * dx + dy * dy) / s2);
      }
    } else {
      bad_token(tok, "unknown term '" + name + "' (expected mode or bump)", kind);
    }
  }
  return {spec, {}, {}, std::move(v)};
}

std::vector<std::uint8_t> forcing_free_mask(const GridField& h, double relative) {
  double mx = 0.0;
  for (std::size_t k = 0; k < h.spec().size(); ++k) mx = std::max(mx, std::abs(h.periodic(k)));
  std::vector<std::uint8_t> m(h.spec().size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::abs(h.periodic(k)) <= relative * mx ? 1 : 0;
  return m;
}

}  // namespace beltrami

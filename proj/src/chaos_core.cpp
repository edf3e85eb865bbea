#include "chaoslim/chaos_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "chaoslim/errors.hpp"

namespace chaoslim {

IndexSet::IndexSet(std::initializer_list<Site> sites) : IndexSet(std::vector<Site>(sites)) {}

IndexSet::IndexSet(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
    throw InputError("index set contains a repeated site");
  }
}

bool IndexSet::contains(Site s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

Kernel::Kernel(Entries entries, std::optional<std::size_t> degree_bound,
               std::optional<std::vector<Site>> universe)
    : degree_bound_(degree_bound) {
  if (universe) std::sort(universe->begin(), universe->end());
  for (auto& [set, c] : entries) {
    if (!std::isfinite(c)) throw InputError("non-finite kernel coefficient");
    if (c == 0.0) continue;
    if (universe) {
      for (Site s : set) {
        if (!std::binary_search(universe->begin(), universe->end(), s)) {
          throw InputError("kernel references a site outside its universe");
        }
      }
    }
    entries_.emplace(set, c);
  }
}

Kernel Kernel::from_entries(std::span<const std::pair<IndexSet, double>> entries) {
  Entries acc;
  for (const auto& [set, c] : entries) acc[set] += c;
  return Kernel(std::move(acc));
}

double Kernel::coefficient(const IndexSet& set) const {
  const auto it = entries_.find(set);
  return it == entries_.end() ? 0.0 : it->second;
}

std::size_t Kernel::degree() const {
  std::size_t d = 0;
  for (const auto& [set, c] : entries_) d = std::max(d, set.size());
  return d;
}

std::vector<Site> Kernel::support() const {
  std::vector<Site> out;
  for (const auto& [set, c] : entries_) out.insert(out.end(), set.begin(), set.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Kernel Kernel::scaled(double a) const {
  Entries out;
  for (const auto& [set, c] : entries_) out.emplace(set, a * c);
  return Kernel(std::move(out), degree_bound_);
}

Kernel operator+(const Kernel& a, const Kernel& b) {
  Kernel::Entries out = a.entries_;
  for (const auto& [set, c] : b.entries_) out[set] += c;
  return Kernel(std::move(out));
}

double eval_multilinear(const Kernel& kernel, const SiteValues& values) {
  double total = 0.0;
  for (const auto& [set, c] : kernel.entries()) {
    double term = c;
    for (Site s : set) {
      const auto it = values.find(s);
      if (it == values.end()) {
        throw InputError("missing value for site " + std::to_string(s));
      }
      term *= it->second;
    }
    total += term;
  }
  return total;
}

double eval_multilinear(const Kernel& kernel, std::span<const double> values) {
  double total = 0.0;
  for (const auto& [set, c] : kernel.entries()) {
    double term = c;
    for (Site s : set) {
      if (s < 0 || static_cast<std::size_t>(s) >= values.size()) {
        throw InputError("missing value for site " + std::to_string(s));
      }
      term *= values[static_cast<std::size_t>(s)];
    }
    total += term;
  }
  return total;
}

double c_psi(const Kernel& kernel) {
  double s = 0.0;
  for (const auto& [set, c] : kernel.entries()) {
    if (!set.empty()) s += c * c;
  }
  return s;
}

double influence(const Kernel& kernel, Site site) {
  double s = 0.0;
  for (const auto& [set, c] : kernel.entries()) {
    if (set.contains(site)) s += c * c;
  }
  return s;
}

double max_influence(const Kernel& kernel) {
  std::map<Site, double> inf;
  for (const auto& [set, c] : kernel.entries()) {
    for (Site s : set) inf[s] += c * c;
  }
  double m = 0.0;
  for (const auto& [s, v] : inf) m = std::max(m, v);
  return m;
}

TruncatedKernel truncate(const Kernel& kernel, std::size_t degree) {
  Kernel::Entries low;
  Kernel::Entries high;
  for (const auto& [set, c] : kernel.entries()) {
    (set.size() <= degree ? low : high).emplace(set, c);
  }
  return {Kernel(std::move(low)), Kernel(std::move(high))};
}

Kernel epsilon_inflate(const Kernel& kernel, double eps) {
  if (!(eps >= 0.0)) throw InputError("epsilon must be nonnegative");
  Kernel::Entries out;
  const double r = std::sqrt(1.0 + eps);
  for (const auto& [set, c] : kernel.entries()) {
    out.emplace(set, c * std::pow(r, static_cast<double>(set.size())));
  }
  return Kernel(std::move(out), kernel.degree_bound());
}

Kernel shift_kernel(const Kernel& kernel, const SiteValues& mu) {
  Kernel::Entries out;
  for (const auto& [set, c] : kernel.entries()) {
    std::vector<Site> fixed;
    std::vector<std::pair<Site, double>> movable;
    for (Site s : set) {
      const auto it = mu.find(s);
      if (it == mu.end() || it->second == 0.0) {
        fixed.push_back(s);
      } else {
        movable.emplace_back(s, it->second);
      }
    }
    if (movable.size() > 30) throw ResourceError("shift_kernel: entry too large to expand");
    const std::uint64_t n_sub = std::uint64_t{1} << movable.size();
    for (std::uint64_t mask = 0; mask < n_sub; ++mask) {
      std::vector<Site> kept = fixed;
      double w = c;
      for (std::size_t j = 0; j < movable.size(); ++j) {
        if (mask >> j & 1U) {
          kept.push_back(movable[j].first);
        } else {
          w *= movable[j].second;
        }
      }
      out[IndexSet(std::move(kept))] += w;
    }
  }
  return Kernel(std::move(out), kernel.degree_bound());
}

namespace {

constexpr double kStdTol = 1e-8;

void require_standardized(double mean, double var) {
  if (std::abs(mean) > kStdTol || std::abs(var - 1.0) > kStdTol) {
    throw InputError("truncated moments need centered unit-variance inputs");
  }
}

TruncatedMoments one_law(const UnivariateLaw& law, double M) {
  TruncatedMoments t;
  t.threshold = M;
  if (const auto* g = std::get_if<StandardGaussian>(&law)) {
    (void)g;
    if (std::isinf(M)) {
      t.m2_above = 0.0;
      t.m3_below = 2.0 * std::sqrt(2.0 / std::numbers::pi);
    } else {
      t.m2_above = 2.0 * (M * normal_pdf(M) + 1.0 - normal_cdf(M));
      t.m3_below =
          2.0 * (2.0 - (M * M + 2.0) * std::exp(-0.5 * M * M)) / std::sqrt(2.0 * std::numbers::pi);
    }
    return t;
  }
  DiscreteLaw d;
  if (const auto* e = std::get_if<EmpiricalSample>(&law)) {
    d = DiscreteLaw::from_samples(e->values);
  } else {
    d = std::get<DiscreteLaw>(law);
  }
  require_standardized(d.mean(), d.variance());
  t.m2_above = d.expect([M](double x) { return std::abs(x) > M ? x * x : 0.0; });
  t.m3_below = d.expect([M](double x) {
    const double a = std::abs(x);
    return a <= M ? a * a * a : 0.0;
  });
  return t;
}

}  // namespace

TruncatedMoments truncated_moments(std::span<const UnivariateLaw> laws, double threshold) {
  if (!(threshold > 0.0)) throw InputError("threshold must be positive");
  TruncatedMoments out;
  out.threshold = threshold;
  for (const auto& law : laws) {
    const auto t = one_law(law, threshold);
    out.m2_above = std::max(out.m2_above, t.m2_above);
    out.m3_below = std::max(out.m3_below, t.m3_below);
  }
  return out;
}

std::vector<double> feasible_thresholds(std::span<const UnivariateLaw> laws,
                                        std::span<const double> grid) {
  std::vector<double> out;
  for (double M : grid) {
    if (truncated_moments(laws, M).m2_above <= 0.25) out.push_back(M);
  }
  return out;
}

double lindeberg_bound(const Kernel& kernel, std::size_t degree, const TruncatedMoments& moments,
                       double c_f) {
  const double m2 = std::isinf(moments.threshold) ? 0.0 : moments.m2_above;
  if (m2 > 0.25) {
    throw PreconditionError("lindeberg bound needs m2 above threshold <= 1/4");
  }
  if (c_f < 0.0 || moments.m3_below < 0.0) throw InputError("negative bound constant");
  const auto [low, high] = truncate(kernel, degree);
  const double c_low = c_psi(low);
  const double l = static_cast<double>(degree);
  const double term1 = 2.0 * std::sqrt(c_psi(high));
  const double term2 = c_low * 16.0 * l * l * m2;
  const double term3 = c_low * std::pow(70.0, l + 1.0) * std::pow(moments.m3_below, l) *
                       std::sqrt(max_influence(low));
  return c_f * (term1 + term2 + term3);
}

double lindeberg_bound_mean(const Kernel& kernel, double eps, double c_mu, std::size_t degree,
                            const TruncatedMoments& moments, double c_f) {
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  if (c_mu < 0.0) throw InputError("c_mu must be nonnegative");
  const double pre = std::isinf(eps) ? 1.0 : std::exp(2.0 * c_mu / eps);
  if (std::isinf(eps)) return lindeberg_bound(kernel, degree, moments, c_f);
  return pre * lindeberg_bound(epsilon_inflate(kernel, eps), degree, moments, c_f);
}

VariableFamily::VariableFamily(std::vector<Member> members) : members_(std::move(members)) {
  if (members_.empty()) throw InputError("empty variable family");
  std::sort(members_.begin(), members_.end(),
            [](const Member& a, const Member& b) { return a.site < b.site; });
  for (std::size_t i = 1; i < members_.size(); ++i) {
    if (members_[i].site == members_[i - 1].site) throw InputError("repeated site in family");
  }
  variance_ = members_.front().law.variance();
  if (!(variance_ > 0.0)) throw InputError("family variance must be positive");
  for (const auto& m : members_) {
    if (std::abs(m.law.variance() - variance_) > 1e-9 * variance_) {
      throw InputError("family members must share one variance");
    }
  }
}

double VariableFamily::mean(Site site) const {
  const auto it = std::lower_bound(members_.begin(), members_.end(), site,
                                   [](const Member& m, Site s) { return m.site < s; });
  if (it == members_.end() || it->site != site) throw InputError("site not in family");
  return it->law.mean();
}

SiteValues VariableFamily::means() const {
  SiteValues out;
  for (const auto& m : members_) out[m.site] = m.law.mean();
  return out;
}

double VariableFamily::c_mu() const {
  double s = 0.0;
  for (const auto& m : members_) {
    const double mu = m.law.mean();
    s += mu * mu;
  }
  return s;
}

void write_kernel(std::ostream& out, const Kernel& kernel) {
  char buf[64];
  for (const auto& [set, c] : kernel.entries()) {
    if (set.empty()) {
      out << '-';
    } else {
      bool first = true;
      for (Site s : set) {
        if (!first) out << ',';
        out << s;
        first = false;
      }
    }
    std::snprintf(buf, sizeof buf, "%.17g", c);
    out << '\t' << buf << '\n';
  }
}

Kernel read_kernel(std::istream& in) {
  std::vector<std::pair<IndexSet, double>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError("kernel line " + std::to_string(lineno) + ": missing tab");
    }
    const std::string lhs = line.substr(0, tab);
    const std::string rhs = line.substr(tab + 1);
    std::vector<Site> sites;
    if (lhs != "-") {
      std::stringstream ss(lhs);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const long long v = std::strtoll(tok.c_str(), &end, 10);
        if (tok.empty() || *end != '\0') {
          throw InputError("kernel line " + std::to_string(lineno) + ": bad site");
        }
        sites.push_back(v);
      }
    }
    char* end = nullptr;
    const double c = std::strtod(rhs.c_str(), &end);
    if (rhs.empty() || *end != '\0') {
      throw InputError("kernel line " + std::to_string(lineno) + ": bad coefficient");
    }
    entries.emplace_back(IndexSet(std::move(sites)), c);
  }
  return Kernel::from_entries(entries);
}

}  // namespace chaoslim

#include "oblivsim/hard_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oblivsim/rng.hpp"

namespace oblivsim {

std::optional<size_t> SubcubeFamily::member(const Point& x) const {
  if (x.dim() != d) throw std::invalid_argument("point dimension mismatch");
  Point prefix = x.slice(0, d - d_prime);
  for (size_t i = 0; i < prefixes.size(); ++i)
    if (prefix == prefixes[i]) return i;
  return std::nullopt;
}

Point SubcubeFamily::make_point(size_t i, const Point& suffix) const {
  if (i >= prefixes.size()) throw std::out_of_range("subcube index out of range");
  if (suffix.dim() != d_prime) throw std::invalid_argument("suffix width mismatch");
  return Point::concat(prefixes[i], suffix);
}

Point SubcubeFamily::make_point(size_t i, uint64_t suffix_value) const {
  return make_point(i, Point::from_value(suffix_value, d_prime));
}

void SubcubeFamily::validate() const {
  if (d_prime == 0 || d < 4 * d_prime) throw std::invalid_argument("need d >= 4*d_prime");
  if (prefixes.empty()) throw std::invalid_argument("no prefixes");
  for (const Point& p : prefixes)
    if (p.dim() != d - d_prime) throw std::invalid_argument("prefix width mismatch");
  for (size_t a = 0; a < prefixes.size(); ++a)
    for (size_t b = a + 1; b < prefixes.size(); ++b)
      if (hamming(prefixes[a], prefixes[b]) <= d_prime)
        throw std::invalid_argument("prefix pair within d_prime");
}

namespace {

Point random_prefix(unsigned width, Rng& rng) {
  Point p(width);
  for (unsigned j = 0; j < width; ++j) p.set(j, rng.bit());
  return p;
}

}  // namespace

SubcubeFamily build_prefixes(unsigned d, unsigned d_prime, size_t k, uint64_t seed,
                             uint64_t max_attempts) {
  if (d_prime == 0 || d < 4 * d_prime) throw std::invalid_argument("need d >= 4*d_prime");
  if (k == 0) throw std::invalid_argument("need at least one prefix");
  Rng rng(seed);
  const unsigned width = d - d_prime;
  for (uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Point> candidate;
    candidate.reserve(k);
    for (size_t i = 0; i < k; ++i) candidate.push_back(random_prefix(width, rng));
    size_t close_pairs = 0;
    for (size_t a = 0; a < k; ++a)
      for (size_t b = a + 1; b < k; ++b)
        if (hamming(candidate[a], candidate[b]) <= d_prime) ++close_pairs;
    if (close_pairs > 0) continue;
    SubcubeFamily family{d, d_prime, std::move(candidate)};
    family.validate();  // independent re-verification of the winner
    return family;
  }
  // Report how close the final candidate came.
  std::ostringstream message;
  message << "prefix sampling exhausted " << max_attempts << " attempts (d=" << d
          << ", d_prime=" << d_prime << ", k=" << k << ")";
  throw std::runtime_error(message.str());
}

uint64_t EpochPlan::total() const {
  uint64_t sum = 0;
  for (uint64_t s : sizes) sum += s;
  return sum;
}

std::vector<uint64_t> EpochPlan::execution_sizes() const {
  return {sizes.rbegin(), sizes.rend()};
}

EpochPlan epoch_plan(uint64_t n_total, uint64_t m, uint64_t w, uint64_t t_u,
                     std::optional<uint64_t> floor_override,
                     std::optional<uint64_t> beta_override) {
  EpochPlan plan;
  if (floor_override) {
    plan.floor_size = *floor_override;
  } else {
    uint64_t root = static_cast<uint64_t>(std::ceil(std::sqrt(static_cast<double>(n_total))));
    plan.floor_size = std::max(root, m * m);
  }
  if (plan.floor_size < 1) throw std::invalid_argument("epoch floor must be at least 1");
  plan.beta = beta_override ? *beta_override : (w * t_u) * (w * t_u);
  if (plan.beta < 2) throw std::invalid_argument("epoch growth factor must be at least 2");
  if (plan.floor_size > n_total) throw std::invalid_argument("epoch floor exceeds the budget");
  uint64_t sum = 0;
  uint64_t next = plan.floor_size;
  while (sum + next <= n_total) {
    plan.sizes.push_back(next);
    sum += next;
    if (next > n_total / plan.beta) break;  // overflow guard
    next *= plan.beta;
  }
  plan.k = plan.sizes.size();
  return plan;
}

uint64_t UpdateScript::total() const {
  uint64_t sum = 0;
  for (const auto& epoch : epochs) sum += epoch.size();
  return sum;
}

std::vector<std::pair<size_t, Point>> UpdateScript::execution_order() const {
  std::vector<std::pair<size_t, Point>> out;
  for (size_t i = epochs.size(); i-- > 0;)
    for (const Point& p : epochs[i]) out.emplace_back(i, p);
  return out;
}

std::vector<Point> sample_epoch_updates(const SubcubeFamily& family, const EpochPlan& plan,
                                        size_t epoch, uint64_t seed) {
  if (epoch >= plan.k || epoch >= family.k()) throw std::out_of_range("epoch index out of range");
  if (family.d_prime > 64) throw std::invalid_argument("suffix wider than 64 bits");
  Rng rng(mix_seed(seed, epoch));
  std::vector<Point> out;
  out.reserve(plan.sizes[epoch]);
  for (uint64_t j = 0; j < plan.sizes[epoch]; ++j)
    out.push_back(family.make_point(epoch, rng.bits(family.d_prime)));
  return out;
}

UpdateScript build_update_script(const SubcubeFamily& family, const EpochPlan& plan,
                                 uint64_t seed) {
  if (plan.k > family.k()) throw std::invalid_argument("more epochs than subcubes");
  UpdateScript script;
  script.d = family.d;
  script.d_prime = family.d_prime;
  for (size_t i = 0; i < plan.k; ++i)
    script.epochs.push_back(sample_epoch_updates(family, plan, i, seed));
  return script;
}

Point outside_query(const SubcubeFamily& family, uint64_t seed) {
  const unsigned width = family.d - family.d_prime;
  if (width < 64 && (uint64_t{1} << width) <= family.k())
    throw std::invalid_argument("no unused prefix exists");
  Rng rng(mix_seed(seed, 0x0751deull));
  for (;;) {
    Point prefix = random_prefix(width, rng);
    bool used = false;
    for (const Point& p : family.prefixes)
      if (p == prefix) {
        used = true;
        break;
      }
    if (used) continue;
    Point suffix(family.d_prime);  // all-zero suffix; only the prefix matters
    return Point::concat(prefix, suffix);
  }
}

unsigned min_pairwise_distance(const std::vector<Point>& points) {
  if (points.size() < 2) throw std::invalid_argument("need at least two points");
  unsigned best = points[0].dim() + 1;
  for (size_t a = 0; a < points.size(); ++a)
    for (size_t b = a + 1; b < points.size(); ++b)
      best = std::min(best, hamming(points[a], points[b]));
  return best;
}

std::string update_script_json(const SubcubeFamily& family, const UpdateScript& script) {
  nlohmann::json doc;
  doc["d"] = family.d;
  doc["d_prime"] = family.d_prime;
  doc["prefixes"] = nlohmann::json::array();
  for (const Point& p : family.prefixes) doc["prefixes"].push_back(p.to_string());
  doc["epochs"] = nlohmann::json::array();
  for (size_t i = 0; i < script.epochs.size(); ++i) {
    nlohmann::json epoch;
    epoch["index"] = i;
    epoch["points"] = nlohmann::json::array();
    for (const Point& p : script.epochs[i]) epoch["points"].push_back(p.to_string());
    doc["epochs"].push_back(std::move(epoch));
  }
  return doc.dump(2) + "\n";
}

std::pair<SubcubeFamily, UpdateScript> update_script_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  SubcubeFamily family;
  family.d = doc.at("d").get<unsigned>();
  family.d_prime = doc.at("d_prime").get<unsigned>();
  for (const auto& entry : doc.at("prefixes"))
    family.prefixes.push_back(Point::from_string(entry.get<std::string>()));
  family.validate();
  UpdateScript script;
  script.d = family.d;
  script.d_prime = family.d_prime;
  script.epochs.resize(doc.at("epochs").size());
  for (const auto& epoch : doc.at("epochs")) {
    size_t index = epoch.at("index").get<size_t>();
    if (index >= script.epochs.size()) throw std::invalid_argument("epoch index out of range");
    for (const auto& entry : epoch.at("points")) {
      Point p = Point::from_string(entry.get<std::string>());
      if (family.member(p) != index) throw std::invalid_argument("point outside its epoch subcube");
      script.epochs[index].push_back(std::move(p));
    }
  }
  return {std::move(family), std::move(script)};
}

}  // namespace oblivsim

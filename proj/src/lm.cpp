#include "rwm/lm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace rwm {

namespace {

void check_prob(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("model probabilities must lie in [0, 1]");
}

}  // namespace

LanguageModel::LanguageModel(Kind kind, double p, std::size_t order, std::vector<double> table)
    : kind_(kind), p_(p), order_(order), mask_(0), table_(std::move(table)) {
  check_prob(p_);
  if (kind_ == Kind::markov) {
    if (order_ == 0 || order_ > kMaxOrder) throw std::invalid_argument("markov order must be in [1, 20]");
    if (table_.size() != (std::size_t{1} << order_)) throw std::invalid_argument("markov table must have 2^k entries");
    for (double q : table_) check_prob(q);
    mask_ = (std::uint64_t{1} << order_) - 1;
  }
}

LanguageModel LanguageModel::uniform() { return LanguageModel(Kind::uniform, 0.5, 0, {}); }

LanguageModel LanguageModel::biased(double p) { return LanguageModel(Kind::biased, p, 0, {}); }

LanguageModel LanguageModel::markov(std::size_t order, std::vector<double> table) {
  return LanguageModel(Kind::markov, 0.5, order, std::move(table));
}

LanguageModel LanguageModel::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("model spec needs a string \"kind\"");
  }
  const auto kind = j["kind"].get<std::string>();
  try {
    if (kind == "uniform") return uniform();
    if (kind == "biased") return biased(j.at("p").get<double>());
    if (kind == "markov") {
      return markov(j.at("order").get<std::size_t>(), j.at("table").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad model spec: ") + e.what());
  }
  throw std::invalid_argument("unknown model kind: " + kind);
}

std::string LanguageModel::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::uniform:
      j["kind"] = "uniform";
      break;
    case Kind::biased:
      j["kind"] = "biased";
      j["p"] = p_;
      break;
    case Kind::markov:
      j["kind"] = "markov";
      j["order"] = order_;
      j["table"] = table_;
      break;
  }
  return j.dump();
}

std::uint64_t LanguageModel::state_of(const BitString& context) const {
  if (kind_ != Kind::markov) return 0;
  std::uint64_t state = 0;
  const std::size_t start = context.size() > order_ ? context.size() - order_ : 0;
  for (std::size_t i = start; i < context.size(); ++i) state = advance(state, context.test(i));
  return state;
}

double LanguageModel::next_bit_prob(const BitString& context) const { return prob_at_state(state_of(context)); }

double LanguageModel::min_entropy_per_block(std::size_t ell) const {
  if (ell == 0) return 0.0;
  if (kind_ != Kind::markov) return static_cast<double>(ell) * -std::log2(std::max(p_, 1.0 - p_));
  if (ell > 32) {
    double worst = 0.0;
    for (double q : table_) worst = std::max(worst, std::max(q, 1.0 - q));
    return static_cast<double>(ell) * -std::log2(worst);
  }
  // best[s] = largest probability of any path of the current length from state s
  std::vector<double> best(table_.size(), 1.0);
  std::vector<double> next(table_.size());
  for (std::size_t step = 0; step < ell; ++step) {
    for (std::uint64_t s = 0; s < table_.size(); ++s) {
      const double q = table_[s];
      next[s] = std::max(q * best[advance(s, true)], (1.0 - q) * best[advance(s, false)]);
    }
    best.swap(next);
  }
  return -std::log2(*std::max_element(best.begin(), best.end()));
}

SamplerState::SamplerState(const LanguageModel& model, Rng& rng, BitString context)
    : model_(&model), rng_(&rng), context_(std::move(context)), state_(model.state_of(context_)) {}

BitString SamplerState::propose(std::size_t ell) {
  if (model_->kind() == LanguageModel::Kind::uniform) return rng_->bits(ell);
  BitString out;
  std::uint64_t state = state_;
  for (std::size_t i = 0; i < ell; ++i) {
    const bool bit = rng_->uniform01() < model_->prob_at_state(state);
    out.push_back(bit);
    state = model_->advance(state, bit);
  }
  return out;
}

void SamplerState::accept(const BitString& bits) {
  context_.append(bits);
  for (std::size_t i = 0; i < bits.size(); ++i) state_ = model_->advance(state_, bits.test(i));
}

BitString response(const LanguageModel& model, const BitString& prompt, std::size_t ell, Rng& rng) {
  SamplerState s(model, rng, prompt);
  return s.propose(ell);
}

}  // namespace rwm

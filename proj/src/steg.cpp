#include "rwm/steg.hpp"

#include <algorithm>
#include <cmath>

#include "rwm/crypto.hpp"

namespace rwm {

StegKey::StegKey(const Seed& r, const StegParams& params, StegTags tags)
    : r_(r), params_(params), tags_(std::move(tags)) {
  if (params_.ell == 0 || params_.ell > kMaxEll) throw std::invalid_argument("sub-block size must be in [1, 64]");
  if (params_.n == 0 || params_.n % params_.ell != 0) throw std::invalid_argument("sub-block size must divide n");
  if (params_.n / params_.ell < 2) throw std::invalid_argument("a block needs at least two sub-blocks");
  if (params_.repetition == 0) throw std::invalid_argument("repetition factor must be positive");
  if (code_length() < params_.repetition) throw std::invalid_argument("block too short for the repetition factor");
  if (tags_.h1 == tags_.h2) throw std::invalid_argument("H1 and H2 need distinct domain tags");
  code_ = std::make_shared<const RepetitionCode>(RepetitionCode::fitting(code_length(), params_.repetition));

  if (params_.ell <= kTableEll) {
    const std::size_t size = std::size_t{1} << params_.ell;
    h1_table_.resize(size);
    h2_table_.reserve(size);
    for (std::uint64_t v = 0; v < size; ++v) {
      h1_table_[v] = h1_uncached(v) ? 1 : 0;
      h2_table_.push_back(h2_uncached(v));
    }
  }
}

bool StegKey::h1_uncached(std::uint64_t v) const {
  const auto d = Sha256().update(tags_.h1).update(r_).update_u64(params_.ell).update_u64(v).finish();
  return d[0] & 1U;
}

BitString StegKey::h2_uncached(std::uint64_t v) const {
  return sha256_expand(tags_.h2, r_, v, code_length());
}

bool StegKey::h1(std::uint64_t sub_block) const {
  if (!h1_table_.empty()) return h1_table_[sub_block] != 0;
  return h1_uncached(sub_block);
}

BitString StegKey::h2(std::uint64_t first_sub_block) const {
  if (!h2_table_.empty()) return h2_table_[first_sub_block];
  return h2_uncached(first_sub_block);
}

const BitString* StegKey::h2_table_entry(std::uint64_t first_sub_block) const {
  return h2_table_.empty() ? nullptr : &h2_table_[first_sub_block];
}

StegKey steg_gen(const StegParams& params, Rng& rng) { return StegKey(rng.seed_bytes(), params); }

std::uint64_t default_retry_cap(const StegKey& key, const LanguageModel& model) {
  const double h = model.min_entropy_per_block(key.ell());
  const double exponent = std::clamp(static_cast<double>(key.ell()) - h, 0.0, 20.0);
  return static_cast<std::uint64_t>(std::ceil(64.0 * std::exp2(exponent)));
}

EmbedResult steg_embed(const StegKey& key, const LanguageModel& model, const BitString& context,
                       const BitString& message, Rng& rng, const EmbedOptions& options) {
  if (message.size() != key.capacity_k()) throw std::invalid_argument("steg message length must equal capacity_k");
  const double h = model.min_entropy_per_block(key.ell());
  if (h < options.entropy_floor) {
    throw EmbedFailure("model min-entropy " + std::to_string(h) + " bits per sub-block is below the floor " +
                       std::to_string(options.entropy_floor));
  }
  const std::uint64_t cap = options.retry_cap ? options.retry_cap : default_retry_cap(key, model);
  const std::size_t ell = key.ell();

  SamplerState sampler(model, rng, context);
  EmbedResult out;
  out.block.resize(0);
  const BitString y1 = sampler.propose(ell);
  sampler.accept(y1);
  out.block.append(y1);

  BitString c = key.payload_code().encode(message);
  c ^= key.h2(y1.extract(0, ell));

  out.attempts.reserve(key.code_length());
  for (std::size_t i = 0; i < key.code_length(); ++i) {
    const bool want = c.test(i);
    std::uint32_t tries = 0;
    for (;;) {
      BitString y = sampler.propose(ell);
      ++tries;
      if (key.h1(y.extract(0, ell)) == want) {
        sampler.accept(y);
        out.block.append(y);
        break;
      }
      if (tries >= cap) {
        throw EmbedFailure("rejection sampling exceeded " + std::to_string(cap) + " attempts at sub-block " +
                           std::to_string(i + 2));
      }
    }
    out.attempts.push_back(tries);
  }
  return out;
}

StegWindow::StegWindow(const StegKey& key, const BitString& source, std::size_t pos)
    : key_(&key), source_(&source), pos_(pos), pad_(nullptr) {
  if (pos > source.size() || source.size() - pos < key.n()) throw std::out_of_range("steg window out of range");
  const auto first = source.extract_unchecked(pos, key.ell());
  pad_ = key.h2_table_entry(first);
  if (!pad_) owned_pad_ = key.h2(first);
}

bool StegWindow::code_bit(std::size_t p) const {
  const std::size_t ell = key_->ell();
  const bool pad_bit = pad_ ? pad_->test(p) : owned_pad_.test(p);
  return key_->h1(source_->extract_unchecked(pos_ + (p + 1) * ell, ell)) != pad_bit;
}

int StegWindow::message_bit(std::size_t j) const {
  return key_->payload_code().vote(j, [&](std::size_t p) { return code_bit(p); });
}

std::int64_t StegWindow::message_prefix(std::size_t width) const {
  std::int64_t value = 0;
  for (std::size_t j = 0; j < width; ++j) {
    const int b = message_bit(j);
    if (b < 0) return -1;
    value |= static_cast<std::int64_t>(b) << j;
  }
  return value;
}

std::optional<BitString> StegWindow::decode() const {
  const auto& code = key_->payload_code();
  BitString out(code.dimension());
  for (std::size_t j = 0; j < code.dimension(); ++j) {
    const int b = message_bit(j);
    if (b < 0) return std::nullopt;
    if (b) out.set(j, true);
  }
  return out;
}

std::optional<BitString> steg_dec_at(const StegKey& key, const BitString& source, std::size_t pos) {
  return StegWindow(key, source, pos).decode();
}

std::optional<BitString> steg_dec(const StegKey& key, const BitString& zeta) {
  if (zeta.size() != key.n()) throw std::invalid_argument("steg_dec input length must equal n");
  return steg_dec_at(key, zeta, 0);
}

}  // namespace rwm

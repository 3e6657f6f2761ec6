#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwm/watermark.hpp"

namespace rwm {

enum class KeyRole : std::uint8_t { generation = 1, verification = 2 };

/// Key file layout (integers little-endian):
///   magic "RWMKEY\0\1" (8 bytes), version u8, role u8,
///   preset: name (u16 length + bytes), n, ell, r_sketch, repetition (u32),
///           signer scheme u8, mac_bits u32, digest_bits u32,
///   steg seed (32 bytes), sketch hash key (32 bytes),
///   signer material (u16 length + bytes): seed for generation files,
///           public key for verification files,
///   SHA-256 of everything above (32 bytes).
std::vector<std::uint8_t> serialize_generation_key(const WatermarkKeySet& keys);
std::vector<std::uint8_t> serialize_verification_key(const VerificationKey& vk);

struct LoadedKey {
  KeyRole role = KeyRole::verification;
  std::optional<WatermarkKeySet> generation;
  VerificationKey verification;
};

/// Throws std::invalid_argument on malformed or corrupted input.
LoadedKey parse_key(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

}  // namespace rwm

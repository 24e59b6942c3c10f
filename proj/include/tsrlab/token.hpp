#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsrlab/errors.hpp"

namespace tsrlab {

/// Fixed 32-symbol HTML structure vocabulary.
///
/// Id layout (frozen, exported through vocabulary_manifest()):
///   0..3    specials           <pad> <sos> <eos> <unk>
///   4..11   paired tags        <thead> </thead> <tbody> </tbody> <tr> </tr> <td> </td>
///   12..13  spanning fragments <td   >
///   14..22  rowspan attributes  rowspan="2" .. rowspan="10" (leading space)
///   23..31  colspan attributes  colspan="2" .. colspan="10" (leading space)
enum class TokenKind : std::uint8_t {
  Pad = 0,
  Sos,
  Eos,
  Unk,
  TheadOpen,
  TheadClose,
  TbodyOpen,
  TbodyClose,
  TrOpen,
  TrClose,
  TdOpen,
  TdClose,
  TdFragment,     // "<td" — opening fragment of a spanning cell
  FragmentClose,  // ">"  — closes the spanning-cell opening
  Rowspan2,
  Rowspan3,
  Rowspan4,
  Rowspan5,
  Rowspan6,
  Rowspan7,
  Rowspan8,
  Rowspan9,
  Rowspan10,
  Colspan2,
  Colspan3,
  Colspan4,
  Colspan5,
  Colspan6,
  Colspan7,
  Colspan8,
  Colspan9,
  Colspan10,
};

inline constexpr int kVocabSize = 32;
inline constexpr int kMaxSpan = 10;
inline constexpr std::size_t kDefaultMaxLen = 512;

namespace detail {

inline const std::array<std::string, kVocabSize>& token_surfaces() {
  static const std::array<std::string, kVocabSize> surfaces = [] {
    std::array<std::string, kVocabSize> s;
    s[0] = "<pad>";
    s[1] = "<sos>";
    s[2] = "<eos>";
    s[3] = "<unk>";
    s[4] = "<thead>";
    s[5] = "</thead>";
    s[6] = "<tbody>";
    s[7] = "</tbody>";
    s[8] = "<tr>";
    s[9] = "</tr>";
    s[10] = "<td>";
    s[11] = "</td>";
    s[12] = "<td";
    s[13] = ">";
    for (int k = 2; k <= kMaxSpan; ++k) {
      s[14 + (k - 2)] = " rowspan=\"" + std::to_string(k) + "\"";
      s[23 + (k - 2)] = " colspan=\"" + std::to_string(k) + "\"";
    }
    return s;
  }();
  return surfaces;
}

}  // namespace detail

struct Token {
  TokenKind kind = TokenKind::Pad;

  constexpr Token() = default;
  constexpr explicit Token(TokenKind k) : kind(k) {}

  constexpr int id() const { return static_cast<int>(kind); }

  const std::string& surface() const { return detail::token_surfaces()[id()]; }

  constexpr bool is_special() const { return id() < 4; }
  constexpr bool is_rowspan() const {
    return kind >= TokenKind::Rowspan2 && kind <= TokenKind::Rowspan10;
  }
  constexpr bool is_colspan() const {
    return kind >= TokenKind::Colspan2 && kind <= TokenKind::Colspan10;
  }
  constexpr bool is_span_attribute() const { return is_rowspan() || is_colspan(); }

  /// Span value carried by an attribute token; 0 for non-attribute tokens.
  constexpr int span_value() const {
    if (is_rowspan()) return id() - static_cast<int>(TokenKind::Rowspan2) + 2;
    if (is_colspan()) return id() - static_cast<int>(TokenKind::Colspan2) + 2;
    return 0;
  }

  static Token from_id(int id) {
    if (id < 0 || id >= kVocabSize) fail(Errc::contains_unknown, "token id out of range: " + std::to_string(id));
    return Token(static_cast<TokenKind>(id));
  }

  static constexpr Token rowspan(int k) {
    return Token(static_cast<TokenKind>(static_cast<int>(TokenKind::Rowspan2) + k - 2));
  }
  static constexpr Token colspan(int k) {
    return Token(static_cast<TokenKind>(static_cast<int>(TokenKind::Colspan2) + k - 2));
  }

  /// Exact surface-form lookup; nullopt for anything outside the vocabulary.
  static std::optional<Token> from_surface(std::string_view text) {
    const auto& surfaces = detail::token_surfaces();
    for (int i = 0; i < kVocabSize; ++i) {
      if (surfaces[i] == text) return Token(static_cast<TokenKind>(i));
    }
    return std::nullopt;
  }

  bool operator==(const Token&) const = default;
};

/// The fixed vocabulary, by ascending id. Stable across calls and versions.
inline const std::vector<Token>& vocabulary() {
  static const std::vector<Token> vocab = [] {
    std::vector<Token> v;
    v.reserve(kVocabSize);
    for (int i = 0; i < kVocabSize; ++i) v.push_back(Token(static_cast<TokenKind>(i)));
    return v;
  }();
  return vocab;
}

/// Versioned id table, one "id<TAB>surface" line per token.
inline std::string vocabulary_manifest() {
  std::string out = "# tsrlab-vocab-v1\n";
  for (const Token& t : vocabulary()) {
    out += std::to_string(t.id());
    out += '\t';
    out += t.surface();
    out += '\n';
  }
  return out;
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t vocabulary_manifest_hash() { return fnv1a64(vocabulary_manifest()); }

struct TokenSequence {
  std::vector<Token> tokens;
  std::size_t bound = kDefaultMaxLen;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  void append(Token t) {
    if (tokens.size() >= bound) {
      fail(Errc::length_exceeded, "sequence exceeds bound " + std::to_string(bound));
    }
    tokens.push_back(t);
  }

  bool operator==(const TokenSequence& other) const { return tokens == other.tokens; }
};

}  // namespace tsrlab

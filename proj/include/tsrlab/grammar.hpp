#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsrlab/errors.hpp"
#include "tsrlab/token.hpp"

namespace tsrlab {

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

/// Maps each raw tag string onto a vocabulary token; anything outside the
/// vocabulary (including spans above 10) becomes <unk>.
inline TokenSequence tokenize(const std::vector<std::string>& raw,
                              std::size_t bound = kDefaultMaxLen) {
  TokenSequence seq;
  seq.bound = bound;
  for (const std::string& piece : raw) {
    auto tok = Token::from_surface(piece);
    seq.append(tok ? *tok : Token(TokenKind::Unk));
  }
  return seq;
}

/// Canonical structure string: token surfaces concatenated with nothing added.
/// <sos>/<eos> are stripped; <unk> and <pad> have no surface form and are
/// rejected.
inline std::string detokenize(const TokenSequence& seq) {
  std::string out;
  for (const Token& t : seq.tokens) {
    if (t.kind == TokenKind::Sos || t.kind == TokenKind::Eos) continue;
    if (t.kind == TokenKind::Unk || t.kind == TokenKind::Pad) {
      fail(Errc::contains_unknown, "sequence contains " + std::string(t.kind == TokenKind::Unk ? "<unk>" : "<pad>"));
    }
    out += t.surface();
  }
  return out;
}

/// Splits a canonical structure string back into raw tag strings.
/// Longest-match over the vocabulary surfaces plus a generic
/// ` rowspan="k"` / ` colspan="k"` pattern so out-of-range spans survive as
/// single chunks (tokenize then maps them to <unk>). Unrecognized text is
/// consumed up to the next '<', ' ' or '>' and kept as one chunk.
inline std::vector<std::string> lex_structure(std::string_view html) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto match_attr = [&](std::size_t pos) -> std::size_t {
    // " rowspan=\"<digits>\"" or " colspan=\"<digits>\"" ; returns length or 0
    for (std::string_view name : {std::string_view(" rowspan=\""), std::string_view(" colspan=\"")}) {
      if (html.substr(pos, name.size()) != name) continue;
      std::size_t j = pos + name.size();
      std::size_t digits = 0;
      while (j < html.size() && html[j] >= '0' && html[j] <= '9') {
        ++j;
        ++digits;
      }
      if (digits > 0 && j < html.size() && html[j] == '"') return j + 1 - pos;
    }
    return 0;
  };
  while (i < html.size()) {
    std::size_t best = 0;
    for (const Token& t : vocabulary()) {
      const std::string& s = t.surface();
      if (s.size() > best && html.substr(i, s.size()) == s) best = s.size();
    }
    if (std::size_t alen = match_attr(i); alen > best) best = alen;
    if (best == 0) {
      std::size_t j = i + 1;
      while (j < html.size() && html[j] != '<' && html[j] != ' ' && html[j] != '>') ++j;
      best = j - i;
    }
    out.emplace_back(html.substr(i, best));
    i += best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Table trees
// ---------------------------------------------------------------------------

enum class TagLabel { Thead, Tbody, Tr, Td };

inline constexpr std::string_view tag_name(TagLabel label) {
  switch (label) {
    case TagLabel::Thead: return "thead";
    case TagLabel::Tbody: return "tbody";
    case TagLabel::Tr: return "tr";
    case TagLabel::Td: return "td";
  }
  return "?";
}

/// Node of the parsed tag tree. Span values 0 mean "absent"; present values
/// lie in [2, 10]. Only td nodes carry spans.
struct TableNode {
  TagLabel label = TagLabel::Td;
  int rowspan = 0;
  int colspan = 0;
  std::vector<TableNode> children;

  bool operator==(const TableNode&) const = default;
};

/// Children of the implicit `table` root.
struct TableTree {
  std::vector<TableNode> roots;

  bool operator==(const TableTree&) const = default;

  std::size_t node_count() const {
    std::size_t n = 0;
    for (const auto& r : roots) n += count(r);
    return n;
  }

 private:
  static std::size_t count(const TableNode& n) {
    std::size_t c = 1;
    for (const auto& ch : n.children) c += count(ch);
    return c;
  }
};

enum class TableClass { Simple, Complex };

namespace detail {

class Parser {
 public:
  explicit Parser(const TokenSequence& seq) : seq_(seq) {}

  TableTree parse() {
    TableTree tree;
    skip_leading_sos();
    while (!at_end()) {
      const Token t = peek();
      if (t.kind == TokenKind::Eos) break;
      switch (t.kind) {
        case TokenKind::TheadOpen:
          tree.roots.push_back(parse_section(TagLabel::Thead, TokenKind::TheadClose));
          break;
        case TokenKind::TbodyOpen:
          tree.roots.push_back(parse_section(TagLabel::Tbody, TokenKind::TbodyClose));
          break;
        case TokenKind::TrOpen:
          // bare rows at top level are tolerated (annotation variance)
          tree.roots.push_back(parse_row());
          break;
        case TokenKind::TheadClose:
        case TokenKind::TbodyClose:
        case TokenKind::TrClose:
        case TokenKind::TdClose:
          fail(Errc::unbalanced_tag, "close tag " + t.surface() + " without matching open");
        case TokenKind::TdOpen:
        case TokenKind::TdFragment:
          fail(Errc::illegal_nesting, "cell outside a row");
        default:
          reject_misc(t);
      }
    }
    return tree;
  }

 private:
  [[noreturn]] void reject_misc(const Token& t) {
    if (t.kind == TokenKind::Unk || t.kind == TokenKind::Pad) {
      fail(Errc::contains_unknown, "sequence contains " + std::string(t.kind == TokenKind::Unk ? "<unk>" : "<pad>"));
    }
    if (t.is_span_attribute()) {
      fail(Errc::dangling_fragment, "span attribute outside a <td fragment");
    }
    if (t.kind == TokenKind::FragmentClose) {
      fail(Errc::dangling_fragment, "> without an opening <td fragment");
    }
    if (t.kind == TokenKind::Sos) {
      fail(Errc::illegal_nesting, "<sos> inside sequence");
    }
    fail(Errc::illegal_nesting, "unexpected token " + t.surface());
  }

  TableNode parse_section(TagLabel label, TokenKind close) {
    consume();  // section open
    TableNode node;
    node.label = label;
    while (true) {
      if (at_end()) fail(Errc::unbalanced_tag, std::string(tag_name(label)) + " never closed");
      const Token t = peek();
      if (t.kind == close) {
        consume();
        return node;
      }
      if (t.kind == TokenKind::TrOpen) {
        node.children.push_back(parse_row());
        continue;
      }
      if (t.kind == TokenKind::TheadClose || t.kind == TokenKind::TbodyClose ||
          t.kind == TokenKind::TrClose || t.kind == TokenKind::TdClose) {
        fail(Errc::unbalanced_tag, "close tag " + t.surface() + " inside open " + std::string(tag_name(label)));
      }
      if (t.kind == TokenKind::TheadOpen || t.kind == TokenKind::TbodyOpen) {
        fail(Errc::illegal_nesting, "section inside " + std::string(tag_name(label)));
      }
      if (t.kind == TokenKind::TdOpen || t.kind == TokenKind::TdFragment) {
        fail(Errc::illegal_nesting, "cell directly inside " + std::string(tag_name(label)));
      }
      reject_misc(t);
    }
  }

  TableNode parse_row() {
    consume();  // <tr>
    TableNode row;
    row.label = TagLabel::Tr;
    while (true) {
      if (at_end()) fail(Errc::unbalanced_tag, "tr never closed");
      const Token t = peek();
      if (t.kind == TokenKind::TrClose) {
        consume();
        return row;
      }
      if (t.kind == TokenKind::TdOpen) {
        consume();
        row.children.push_back(parse_cell_body(TableNode{TagLabel::Td, 0, 0, {}}));
        continue;
      }
      if (t.kind == TokenKind::TdFragment) {
        row.children.push_back(parse_spanning_cell());
        continue;
      }
      if (t.kind == TokenKind::TrOpen || t.kind == TokenKind::TheadOpen ||
          t.kind == TokenKind::TbodyOpen) {
        fail(Errc::illegal_nesting, t.surface() + " inside tr");
      }
      if (t.kind == TokenKind::TheadClose || t.kind == TokenKind::TbodyClose ||
          t.kind == TokenKind::TdClose) {
        fail(Errc::unbalanced_tag, "close tag " + t.surface() + " inside open tr");
      }
      reject_misc(t);
    }
  }

  // `<td` [attributes] `>` ... `</td>`. An attribute-free fragment run
  // normalizes to a plain <td>.
  TableNode parse_spanning_cell() {
    consume();  // <td
    TableNode cell;
    cell.label = TagLabel::Td;
    while (true) {
      if (at_end()) fail(Errc::dangling_fragment, "<td fragment never closed by >");
      const Token t = peek();
      if (t.is_rowspan()) {
        if (cell.rowspan != 0) fail(Errc::duplicate_attribute, "rowspan given twice");
        cell.rowspan = t.span_value();
        consume();
        continue;
      }
      if (t.is_colspan()) {
        if (cell.colspan != 0) fail(Errc::duplicate_attribute, "colspan given twice");
        cell.colspan = t.span_value();
        consume();
        continue;
      }
      if (t.kind == TokenKind::FragmentClose) {
        consume();
        return parse_cell_body(std::move(cell));
      }
      fail(Errc::dangling_fragment, "<td fragment interrupted by " + t.surface());
    }
  }

  TableNode parse_cell_body(TableNode cell) {
    if (at_end()) fail(Errc::unbalanced_tag, "td never closed");
    const Token t = peek();
    if (t.kind != TokenKind::TdClose) {
      if (t.kind == TokenKind::TrOpen || t.kind == TokenKind::TdOpen ||
          t.kind == TokenKind::TdFragment || t.kind == TokenKind::TheadOpen ||
          t.kind == TokenKind::TbodyOpen) {
        fail(Errc::illegal_nesting, t.surface() + " inside td");
      }
      if (t.kind == TokenKind::TrClose || t.kind == TokenKind::TheadClose ||
          t.kind == TokenKind::TbodyClose) {
        fail(Errc::unbalanced_tag, "close tag " + t.surface() + " inside open td");
      }
      reject_misc(t);
    }
    consume();  // </td>
    return cell;
  }

  void skip_leading_sos() {
    while (!at_end() && peek().kind == TokenKind::Sos && pos_ == 0) consume();
  }

  bool at_end() const { return pos_ >= seq_.size(); }
  const Token& peek() const { return seq_[pos_]; }
  void consume() { ++pos_; }

  const TokenSequence& seq_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a token sequence into a tag tree. Leading <sos> and a trailing
/// <eos> are tolerated; everything after <eos> is ignored.
inline TableTree parse(const TokenSequence& seq) { return detail::Parser(seq).parse(); }

namespace detail {

inline void serialize_node(const TableNode& n, std::vector<Token>& out) {
  switch (n.label) {
    case TagLabel::Thead:
    case TagLabel::Tbody: {
      const bool head = n.label == TagLabel::Thead;
      out.push_back(Token(head ? TokenKind::TheadOpen : TokenKind::TbodyOpen));
      for (const auto& ch : n.children) serialize_node(ch, out);
      out.push_back(Token(head ? TokenKind::TheadClose : TokenKind::TbodyClose));
      return;
    }
    case TagLabel::Tr:
      out.push_back(Token(TokenKind::TrOpen));
      for (const auto& ch : n.children) serialize_node(ch, out);
      out.push_back(Token(TokenKind::TrClose));
      return;
    case TagLabel::Td:
      if (n.rowspan == 0 && n.colspan == 0) {
        out.push_back(Token(TokenKind::TdOpen));
      } else {
        out.push_back(Token(TokenKind::TdFragment));
        // canonical attribute order: rowspan before colspan
        if (n.rowspan != 0) out.push_back(Token::rowspan(n.rowspan));
        if (n.colspan != 0) out.push_back(Token::colspan(n.colspan));
        out.push_back(Token(TokenKind::FragmentClose));
      }
      out.push_back(Token(TokenKind::TdClose));
      return;
  }
}

}  // namespace detail

/// Inverse of parse(): canonical token sequence for a tree, no specials.
inline TokenSequence serialize(const TableTree& tree) {
  TokenSequence seq;
  std::vector<Token> out;
  for (const auto& r : tree.roots) detail::serialize_node(r, out);
  seq.bound = out.size() > kDefaultMaxLen ? out.size() : kDefaultMaxLen;
  seq.tokens = std::move(out);
  return seq;
}

/// Complex iff any cell carries a rowspan or colspan attribute.
inline TableClass classify(const TableTree& tree) {
  struct Walker {
    static bool has_span(const TableNode& n) {
      if (n.rowspan != 0 || n.colspan != 0) return true;
      for (const auto& ch : n.children) {
        if (has_span(ch)) return true;
      }
      return false;
    }
  };
  for (const auto& r : tree.roots) {
    if (Walker::has_span(r)) return TableClass::Complex;
  }
  return TableClass::Simple;
}

// ---------------------------------------------------------------------------
// Grid expansion
// ---------------------------------------------------------------------------

/// Row-major occupancy grid. cells[r*cols + c] holds the covering cell id or
/// -1. `ragged` flags rows that do not reach the full column count after span
/// expansion (a warning, not an error — real annotations are ragged).
struct GridTable {
  int rows = 0;
  int cols = 0;
  int cell_count = 0;
  bool ragged = false;
  std::vector<int> cells;

  int at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
};

inline GridTable expand_grid(const TableTree& tree) {
  // collect rows in document order; thead/tbody are transparent wrappers
  std::vector<const TableNode*> rows;
  for (const auto& r : tree.roots) {
    if (r.label == TagLabel::Tr) {
      rows.push_back(&r);
    } else {
      for (const auto& ch : r.children) rows.push_back(&ch);
    }
  }

  GridTable grid;
  grid.rows = static_cast<int>(rows.size());
  std::vector<std::vector<int>> occ(rows.size());  // -1 = free

  auto ensure = [&](int r, int width) {
    if (r >= grid.rows) {
      grid.rows = r + 1;
      occ.resize(grid.rows);
    }
    if (static_cast<int>(occ[r].size()) < width) occ[r].resize(width, -1);
  };

  int next_cell = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int cursor = 0;
    for (const TableNode& cell : rows[r]->children) {
      const int rs = cell.rowspan == 0 ? 1 : cell.rowspan;
      const int cs = cell.colspan == 0 ? 1 : cell.colspan;
      while (cursor < static_cast<int>(occ[r].size()) && occ[r][cursor] != -1) ++cursor;
      const int id = next_cell++;
      for (int dr = 0; dr < rs; ++dr) {
        ensure(static_cast<int>(r) + dr, cursor + cs);
        for (int dc = 0; dc < cs; ++dc) {
          int& slot = occ[r + dr][cursor + dc];
          if (slot != -1) {
            fail(Errc::span_overlap, "cells " + std::to_string(slot) + " and " + std::to_string(id) + " collide");
          }
          slot = id;
        }
      }
      cursor += cs;
    }
  }
  grid.cell_count = next_cell;

  grid.cols = 0;
  for (const auto& row : occ) grid.cols = std::max<int>(grid.cols, static_cast<int>(row.size()));
  grid.cells.assign(static_cast<std::size_t>(grid.rows) * grid.cols, -1);
  for (int r = 0; r < grid.rows; ++r) {
    int covered = 0;
    for (int c = 0; c < static_cast<int>(occ[r].size()); ++c) {
      grid.cells[static_cast<std::size_t>(r) * grid.cols + c] = occ[r][c];
      if (occ[r][c] != -1) ++covered;
    }
    if (grid.rows > 0 && covered != grid.cols) grid.ragged = true;
  }
  return grid;
}

}  // namespace tsrlab

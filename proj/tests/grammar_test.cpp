#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "tsrlab/grammar.hpp"
#include "tsrlab/token.hpp"

using namespace tsrlab;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a tsrlab::Error";
  return Errc::empty_input;
}

TokenSequence seq_of(std::initializer_list<const char*> raw) {
  std::vector<std::string> v(raw.begin(), raw.end());
  return tokenize(v);
}

std::string raw_string(const TokenSequence& seq) {
  std::string out;
  for (const Token& t : seq.tokens) out += t.surface();
  return out;
}

}  // namespace

TEST(Vocabulary, HasExactly32DistinctTokens) {
  const auto& vocab = vocabulary();
  ASSERT_EQ(vocab.size(), 32u);
  std::set<int> ids;
  std::set<std::string> surfaces;
  for (const Token& t : vocab) {
    ids.insert(t.id());
    surfaces.insert(t.surface());
  }
  EXPECT_EQ(ids.size(), 32u);
  EXPECT_EQ(*ids.begin(), 0);
  EXPECT_EQ(*ids.rbegin(), 31);
  EXPECT_EQ(surfaces.size(), 32u) << "surface forms must be unique";
}

TEST(Vocabulary, SurfaceLookupIsABijection) {
  for (const Token& t : vocabulary()) {
    auto back = Token::from_surface(t.surface());
    ASSERT_TRUE(back.has_value()) << t.surface();
    EXPECT_EQ(back->id(), t.id());
  }
  EXPECT_FALSE(Token::from_surface("<table>").has_value());
  EXPECT_FALSE(Token::from_surface(" rowspan=\"11\"").has_value());
  EXPECT_FALSE(Token::from_surface(" rowspan=\"1\"").has_value());
}

TEST(Vocabulary, SpanningFragmentsAreDistinctTokens) {
  auto frag = Token::from_surface("<td");
  auto close = Token::from_surface(">");
  auto full = Token::from_surface("<td>");
  ASSERT_TRUE(frag && close && full);
  EXPECT_NE(frag->id(), full->id());
  EXPECT_NE(frag->id(), close->id());
}

TEST(Vocabulary, NineRowspanAndNineColspanTokens) {
  int rowspans = 0, colspans = 0;
  for (const Token& t : vocabulary()) {
    rowspans += t.is_rowspan();
    colspans += t.is_colspan();
  }
  EXPECT_EQ(rowspans, 9);
  EXPECT_EQ(colspans, 9);
  EXPECT_EQ(Token::rowspan(2).surface(), " rowspan=\"2\"");
  EXPECT_EQ(Token::colspan(10).surface(), " colspan=\"10\"");
  EXPECT_EQ(Token::colspan(6).span_value(), 6);
}

TEST(Vocabulary, ManifestListsEveryIdOnce) {
  const std::string manifest = vocabulary_manifest();
  std::istringstream in(manifest);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "# tsrlab-vocab-v1");
  int expected_id = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    EXPECT_EQ(std::stoi(line.substr(0, tab)), expected_id);
    EXPECT_EQ(line.substr(tab + 1), Token::from_id(expected_id).surface());
    ++expected_id;
  }
  EXPECT_EQ(expected_id, 32);
  EXPECT_EQ(vocabulary_manifest_hash(), fnv1a64(manifest));
}

TEST(Tokenize, PlainRowMapsWithoutUnknowns) {
  const TokenSequence seq = seq_of({"<tr>", "<td>", "</td>", "</tr>"});
  ASSERT_EQ(seq.size(), 4u);
  for (const Token& t : seq.tokens) EXPECT_NE(t.kind, TokenKind::Unk);
}

TEST(Tokenize, SpanningCellOpening) {
  const TokenSequence seq = seq_of({"<td", " colspan=\"6\"", ">"});
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq[0].kind, TokenKind::TdFragment);
  EXPECT_EQ(seq[1].kind, TokenKind::Colspan6);
  EXPECT_EQ(seq[2].kind, TokenKind::FragmentClose);
}

TEST(Tokenize, SpanAboveTenBecomesUnknown) {
  const TokenSequence seq = seq_of({"<td", " colspan=\"12\"", ">"});
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq[1].kind, TokenKind::Unk);
}

TEST(Tokenize, BoundIsEnforced) {
  std::vector<std::string> raw(5, "<td>");
  EXPECT_EQ(code_of([&] { tokenize(raw, 4); }), Errc::length_exceeded);
}

TEST(Detokenize, ConcatenatesSurfaces) {
  EXPECT_EQ(detokenize(seq_of({"<tr>", "<td>", "</td>", "</tr>"})), "<tr><td></td></tr>");
}

TEST(Detokenize, EmptySequenceIsEmptyString) { EXPECT_EQ(detokenize(TokenSequence{}), ""); }

TEST(Detokenize, StripsSpecialsAndRejectsUnknown) {
  EXPECT_EQ(detokenize(seq_of({"<sos>", "<td>", "</td>", "<eos>"})), "<td></td>");
  EXPECT_EQ(code_of([&] { detokenize(seq_of({"<td>", "nonsense"})); }), Errc::contains_unknown);
  EXPECT_EQ(code_of([&] { detokenize(seq_of({"<pad>"})); }), Errc::contains_unknown);
}

TEST(Lex, SplitsCanonicalString) {
  const auto raw = lex_structure("<tr><td colspan=\"6\"></td></tr>");
  const std::vector<std::string> expected{"<tr>", "<td", " colspan=\"6\"", ">", "</td>", "</tr>"};
  EXPECT_EQ(raw, expected);
}

TEST(Lex, KeepsOutOfVocabularyChunks) {
  const auto raw = lex_structure("<td rowspan=\"12\"></td>");
  ASSERT_EQ(raw.size(), 4u);
  EXPECT_EQ(raw[1], " rowspan=\"12\"");
  EXPECT_EQ(tokenize(raw)[1].kind, TokenKind::Unk);
}

TEST(Parse, PlainBody) {
  const TableTree tree = parse(seq_of({"<tbody>", "<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>", "</tbody>"}));
  ASSERT_EQ(tree.roots.size(), 1u);
  EXPECT_EQ(tree.roots[0].label, TagLabel::Tbody);
  ASSERT_EQ(tree.roots[0].children.size(), 1u);
  EXPECT_EQ(tree.roots[0].children[0].children.size(), 2u);
  EXPECT_EQ(tree.node_count(), 4u);
}

TEST(Parse, SpanningCellCarriesColspan) {
  const TableTree tree = parse(seq_of({"<tr>", "<td", " colspan=\"6\"", ">", "</td>", "</tr>"}));
  ASSERT_EQ(tree.roots.size(), 1u);
  const TableNode& td = tree.roots[0].children[0];
  EXPECT_EQ(td.colspan, 6);
  EXPECT_EQ(td.rowspan, 0);
}

TEST(Parse, RejectsCloseWithoutOpen) {
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "</td>"})); }), Errc::unbalanced_tag);
  EXPECT_EQ(code_of([&] { parse(seq_of({"</tbody>"})); }), Errc::unbalanced_tag);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tbody>", "<tr>", "</tbody>"})); }), Errc::unbalanced_tag);
}

TEST(Parse, RejectsIllegalNesting) {
  EXPECT_EQ(code_of([&] { parse(seq_of({"<td>", "</td>"})); }), Errc::illegal_nesting);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "<tr>"})); }), Errc::illegal_nesting);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tbody>", "<td>", "</td>", "</tbody>"})); }),
            Errc::illegal_nesting);
}

TEST(Parse, RejectsDanglingFragments) {
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "<td"})); }), Errc::dangling_fragment);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", ">", "</tr>"})); }), Errc::dangling_fragment);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", " rowspan=\"2\"", "</tr>"})); }),
            Errc::dangling_fragment);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "<td", "<td>", "</tr>"})); }),
            Errc::dangling_fragment);
}

TEST(Parse, RejectsDuplicateAttribute) {
  EXPECT_EQ(
      code_of([&] { parse(seq_of({"<tr>", "<td", " rowspan=\"2\"", " rowspan=\"3\"", ">", "</td>", "</tr>"})); }),
      Errc::duplicate_attribute);
}

TEST(Parse, RejectsUnknownAndPad) {
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "garbage", "</tr>"})); }), Errc::contains_unknown);
  EXPECT_EQ(code_of([&] { parse(seq_of({"<tr>", "<pad>", "</tr>"})); }), Errc::contains_unknown);
}

TEST(Parse, StripsLeadingSosAndTrailingEos) {
  const TableTree tree = parse(seq_of({"<sos>", "<tr>", "<td>", "</td>", "</tr>", "<eos>", "<pad>"}));
  ASSERT_EQ(tree.roots.size(), 1u);
  EXPECT_EQ(tree.roots[0].label, TagLabel::Tr);
}

TEST(Parse, AttributeFreeFragmentNormalizesToPlainCell) {
  const TableTree tree = parse(seq_of({"<tr>", "<td", ">", "</td>", "</tr>"}));
  EXPECT_EQ(detokenize(serialize(tree)), "<tr><td></td></tr>");
}

TEST(Parse, AttributeOrderIsNormalized) {
  const TableTree tree =
      parse(seq_of({"<tr>", "<td", " colspan=\"3\"", " rowspan=\"2\"", ">", "</td>", "</tr>"}));
  EXPECT_EQ(detokenize(serialize(tree)), "<tr><td rowspan=\"2\" colspan=\"3\"></td></tr>");
}

TEST(Classify, PlainTreeIsSimple) {
  const TableTree tree = parse(seq_of({"<tbody>", "<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>", "</tbody>"}));
  EXPECT_EQ(classify(tree), TableClass::Simple);
}

TEST(Classify, AnySpanMakesComplex) {
  const TableTree tree = parse(seq_of({"<tr>", "<td", " colspan=\"6\"", ">", "</td>", "</tr>"}));
  EXPECT_EQ(classify(tree), TableClass::Complex);
}

TEST(Classify, EmptyTreeIsSimple) { EXPECT_EQ(classify(TableTree{}), TableClass::Simple); }

TEST(ExpandGrid, TwoByTwoPlain) {
  const TableTree tree = parse(seq_of(
      {"<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>", "<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>"}));
  const GridTable grid = expand_grid(tree);
  EXPECT_EQ(grid.rows, 2);
  EXPECT_EQ(grid.cols, 2);
  EXPECT_EQ(grid.cell_count, 4);
  EXPECT_FALSE(grid.ragged);
}

TEST(ExpandGrid, ColspanCoversBothColumns) {
  const TableTree tree = parse(seq_of({"<tr>", "<td", " colspan=\"2\"", ">", "</td>", "</tr>"}));
  const GridTable grid = expand_grid(tree);
  EXPECT_EQ(grid.rows, 1);
  EXPECT_EQ(grid.cols, 2);
  EXPECT_EQ(grid.cell_count, 1);
  EXPECT_EQ(grid.at(0, 0), grid.at(0, 1));
}

TEST(ExpandGrid, RowspanFillsSecondRow) {
  // row 1: td(rowspan=2), td; row 2: td  ->  2x2 fully covered
  const TableTree tree = parse(seq_of({"<tr>", "<td", " rowspan=\"2\"", ">", "</td>", "<td>",
                                       "</td>", "</tr>", "<tr>", "<td>", "</td>", "</tr>"}));
  const GridTable grid = expand_grid(tree);
  EXPECT_EQ(grid.rows, 2);
  EXPECT_EQ(grid.cols, 2);
  EXPECT_EQ(grid.cell_count, 3);
  EXPECT_FALSE(grid.ragged);
  EXPECT_EQ(grid.at(0, 0), grid.at(1, 0));
  EXPECT_NE(grid.at(1, 0), grid.at(1, 1));
}

TEST(ExpandGrid, UnequalRowsAreFlaggedRagged) {
  const TableTree tree =
      parse(seq_of({"<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>", "<tr>", "<td>", "</td>", "</tr>"}));
  const GridTable grid = expand_grid(tree);
  EXPECT_TRUE(grid.ragged);
  EXPECT_EQ(grid.cols, 2);
}

TEST(ExpandGrid, RowspanBeyondLastRowExtendsGrid) {
  const TableTree tree = parse(seq_of({"<tr>", "<td", " rowspan=\"3\"", ">", "</td>", "</tr>"}));
  const GridTable grid = expand_grid(tree);
  EXPECT_EQ(grid.rows, 3);
  EXPECT_EQ(grid.cols, 1);
}

TEST(ExpandGrid, EmptyTree) {
  const GridTable grid = expand_grid(TableTree{});
  EXPECT_EQ(grid.rows, 0);
  EXPECT_EQ(grid.cols, 0);
  EXPECT_EQ(grid.cell_count, 0);
}

TEST(GrammarProperty, SerializeParseRoundTrip) {
  testutil::Rng rng(20240901);
  for (int trial = 0; trial < 500; ++trial) {
    const TableTree tree = testutil::random_table_tree(rng);
    const TokenSequence seq = serialize(tree);
    EXPECT_EQ(parse(seq), tree);
  }
}

TEST(GrammarProperty, DetokenizeTokenizeIdentity) {
  testutil::Rng rng(20240902);
  for (int trial = 0; trial < 500; ++trial) {
    const TokenSequence seq = serialize(testutil::random_table_tree(rng));
    const std::string html = detokenize(seq);
    const TokenSequence again = tokenize(lex_structure(html), seq.bound);
    EXPECT_EQ(again, seq);
    EXPECT_EQ(detokenize(again), html);
  }
}

TEST(GrammarProperty, BreakingMutationsAreRejected) {
  testutil::Rng rng(20240903);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const TokenSequence seq = serialize(testutil::random_table_tree(rng));
    for (const TokenSequence& bad : testutil::breaking_mutations(seq)) {
      ++checked;
      EXPECT_THROW(parse(bad), Error) << raw_string(bad);
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(GrammarProperty, ComplexIffSerializationUsesSpanAttribute) {
  testutil::Rng rng(20240904);
  for (int trial = 0; trial < 300; ++trial) {
    const TableTree tree = testutil::random_table_tree(rng);
    const TokenSequence seq = serialize(tree);
    const bool has_attr = std::any_of(seq.tokens.begin(), seq.tokens.end(),
                                      [](const Token& t) { return t.is_span_attribute(); });
    EXPECT_EQ(classify(tree) == TableClass::Complex, has_attr);
  }
}

TEST(GrammarProperty, ConsistentGridsExpandToExactRectangles) {
  testutil::Rng rng(20240905);
  for (int trial = 0; trial < 300; ++trial) {
    const TableTree tree = testutil::random_grid_table_tree(rng);
    const GridTable grid = expand_grid(tree);
    EXPECT_FALSE(grid.ragged);
    // every cell id appears as a solid rectangle of its spans
    std::vector<int> area(static_cast<std::size_t>(grid.cell_count), 0);
    for (int id : grid.cells) {
      if (id >= 0) ++area[static_cast<std::size_t>(id)];
    }
    std::vector<const TableNode*> cells;
    for (const auto& root : tree.roots) {
      const auto rows = root.label == TagLabel::Tr ? std::vector<const TableNode*>{&root}
                                                   : [&] {
                                                       std::vector<const TableNode*> rs;
                                                       for (const auto& ch : root.children) rs.push_back(&ch);
                                                       return rs;
                                                     }();
      for (const TableNode* row : rows) {
        for (const auto& td : row->children) cells.push_back(&td);
      }
    }
    ASSERT_EQ(cells.size(), area.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const int rs = cells[i]->rowspan == 0 ? 1 : cells[i]->rowspan;
      const int cs = cells[i]->colspan == 0 ? 1 : cells[i]->colspan;
      EXPECT_EQ(area[i], rs * cs);
    }
  }
}

TEST(GrammarProperty, ArbitrarySpansEitherExpandExactlyOrCollide) {
  testutil::Rng rng(20240906);
  int overlaps = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const TableTree tree = testutil::random_table_tree(rng, /*span_prob=*/0.5);
    try {
      const GridTable grid = expand_grid(tree);
      int covered = 0;
      for (int id : grid.cells) covered += id >= 0;
      int expected = 0;
      for (const auto& root : tree.roots) {
        const bool bare = root.label == TagLabel::Tr;
        for (const auto& row : bare ? std::vector<TableNode>{root} : root.children) {
          for (const auto& td : row.children) {
            expected += (td.rowspan == 0 ? 1 : td.rowspan) * (td.colspan == 0 ? 1 : td.colspan);
          }
        }
      }
      EXPECT_EQ(covered, expected);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::span_overlap);
      ++overlaps;
    }
  }
  EXPECT_GT(overlaps, 0) << "generator should exercise the collision path";
}

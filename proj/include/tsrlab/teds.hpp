#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsrlab/errors.hpp"
#include "tsrlab/grammar.hpp"

namespace tsrlab {

// ---------------------------------------------------------------------------
// Ordered labeled trees and the tree-edit-distance similarity score
// ---------------------------------------------------------------------------

struct TreeNode {
  std::string label;
  int rowspan = 0;
  int colspan = 0;
  std::vector<TreeNode> children;
};

struct LabeledTree {
  TreeNode root;

  std::size_t size() const { return count(root); }

 private:
  static std::size_t count(const TreeNode& n) {
    std::size_t c = 1;
    for (const auto& ch : n.children) c += count(ch);
    return c;
  }
};

/// Wraps a parsed tag tree in a synthetic `table` root. Node counts used by
/// the similarity score include this root.
inline LabeledTree to_labeled_tree(const TableTree& tree) {
  struct Conv {
    static TreeNode node(const TableNode& n) {
      TreeNode out;
      out.label = std::string(tag_name(n.label));
      out.rowspan = n.rowspan;
      out.colspan = n.colspan;
      for (const auto& ch : n.children) out.children.push_back(node(ch));
      return out;
    }
  };
  LabeledTree lt;
  lt.root.label = "table";
  for (const auto& r : tree.roots) lt.root.children.push_back(Conv::node(r));
  return lt;
}

/// Unit edit costs; rename is free only when label and span attributes all
/// match. Structure-only: cell text never enters the comparison.
struct CostModel {
  double insert_cost = 1.0;
  double delete_cost = 1.0;
  std::function<double(const TreeNode&, const TreeNode&)> rename_cost =
      [](const TreeNode& a, const TreeNode& b) {
        return (a.label == b.label && a.rowspan == b.rowspan && a.colspan == b.colspan) ? 0.0
                                                                                       : 1.0;
      };
};

namespace detail {

// Postorder flattening with leftmost-leaf-descendant indices and keyroots,
// the standard decomposition for the Zhang–Shasha algorithm.
struct ZsTree {
  std::vector<const TreeNode*> post;
  std::vector<int> lml;
  std::vector<int> keyroots;
};

inline int zs_flatten(const TreeNode& n, ZsTree& t) {
  int first = -1;
  for (const auto& ch : n.children) {
    int leaf = zs_flatten(ch, t);
    if (first < 0) first = leaf;
  }
  const int idx = static_cast<int>(t.post.size());
  t.post.push_back(&n);
  t.lml.push_back(first < 0 ? idx : first);
  return t.lml.back();
}

inline ZsTree zs_build(const TreeNode& root) {
  ZsTree t;
  zs_flatten(root, t);
  // keyroots: for each distinct leftmost leaf, the highest node above it
  std::vector<int> last_for_lml(t.post.size(), -1);
  for (int i = 0; i < static_cast<int>(t.post.size()); ++i) last_for_lml[t.lml[i]] = i;
  for (int v : last_for_lml) {
    if (v >= 0) t.keyroots.push_back(v);
  }
  std::sort(t.keyroots.begin(), t.keyroots.end());
  return t;
}

}  // namespace detail

/// Exact minimal edit cost between two ordered labeled trees
/// (insert/delete/rename), Zhang–Shasha keyroots formulation.
inline double tree_edit_distance(const LabeledTree& a, const LabeledTree& b,
                                 const CostModel& cost = CostModel{}) {
  const detail::ZsTree ta = detail::zs_build(a.root);
  const detail::ZsTree tb = detail::zs_build(b.root);
  const int n1 = static_cast<int>(ta.post.size());
  const int n2 = static_cast<int>(tb.post.size());

  std::vector<std::vector<double>> td(n1, std::vector<double>(n2, 0.0));
  std::vector<std::vector<double>> fd(n1 + 1, std::vector<double>(n2 + 1, 0.0));

  for (int k1 : ta.keyroots) {
    for (int k2 : tb.keyroots) {
      const int l1 = ta.lml[k1];
      const int l2 = tb.lml[k2];
      fd[0][0] = 0.0;
      for (int i = l1; i <= k1; ++i) fd[i - l1 + 1][0] = fd[i - l1][0] + cost.delete_cost;
      for (int j = l2; j <= k2; ++j) fd[0][j - l2 + 1] = fd[0][j - l2] + cost.insert_cost;
      for (int i = l1; i <= k1; ++i) {
        for (int j = l2; j <= k2; ++j) {
          const int di = i - l1 + 1;
          const int dj = j - l2 + 1;
          const double del = fd[di - 1][dj] + cost.delete_cost;
          const double ins = fd[di][dj - 1] + cost.insert_cost;
          if (ta.lml[i] == l1 && tb.lml[j] == l2) {
            const double ren = fd[di - 1][dj - 1] + cost.rename_cost(*ta.post[i], *tb.post[j]);
            fd[di][dj] = std::min({del, ins, ren});
            td[i][j] = fd[di][dj];
          } else {
            const double sub = fd[ta.lml[i] - l1][tb.lml[j] - l2] + td[i][j];
            fd[di][dj] = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return td[n1 - 1][n2 - 1];
}

/// Similarity of two parsed tables: 1 - dist / max(|pred|, |gt|), clamped to
/// [0, 1]. Sizes include the synthetic root, so two empty tables score 1.
inline double teds_score(const TableTree& pred, const TableTree& gt,
                         const CostModel& cost = CostModel{}) {
  const LabeledTree tp = to_labeled_tree(pred);
  const LabeledTree tg = to_labeled_tree(gt);
  const double d = tree_edit_distance(tp, tg, cost);
  const double denom = static_cast<double>(std::max(tp.size(), tg.size()));
  return std::clamp(1.0 - d / denom, 0.0, 1.0);
}

/// Sequence-level score. The ground truth must parse; a prediction that does
/// not parse scores 0 (callers flag these separately).
inline double teds(const TokenSequence& pred, const TokenSequence& gt) {
  const TableTree gt_tree = parse(gt);
  TableTree pred_tree;
  try {
    pred_tree = parse(pred);
  } catch (const Error&) {
    return 0.0;
  }
  return teds_score(pred_tree, gt_tree);
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct SampleScore {
  std::string id;
  TableClass cls = TableClass::Simple;
  double score = 0.0;
};

/// Per-class and overall means in percent, 2 decimals. A class with no
/// samples has no mean. all_mean averages every sample, not the class means.
struct TedsReport {
  std::vector<SampleScore> per_sample;
  std::optional<double> simple_mean;
  std::optional<double> complex_mean;
  double all_mean = 0.0;
};

/// Round-half-up to 2 decimals, in percent: 2/3 -> 66.67.
inline double to_percent(double fraction) {
  return std::floor(fraction * 10000.0 + 0.5) / 100.0;
}

inline TedsReport aggregate(std::vector<SampleScore> scores) {
  if (scores.empty()) fail(Errc::empty_input, "no scores to aggregate");
  double sum_all = 0.0, sum_simple = 0.0, sum_complex = 0.0;
  std::size_t n_simple = 0, n_complex = 0;
  for (const auto& s : scores) {
    sum_all += s.score;
    if (s.cls == TableClass::Simple) {
      sum_simple += s.score;
      ++n_simple;
    } else {
      sum_complex += s.score;
      ++n_complex;
    }
  }
  TedsReport report;
  report.per_sample = std::move(scores);
  if (n_simple > 0) report.simple_mean = to_percent(sum_simple / n_simple);
  if (n_complex > 0) report.complex_mean = to_percent(sum_complex / n_complex);
  report.all_mean = to_percent(sum_all / report.per_sample.size());
  return report;
}

}  // namespace tsrlab

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsrlab {

enum class Errc {
  length_exceeded,
  contains_unknown,
  unbalanced_tag,
  illegal_nesting,
  dangling_fragment,
  duplicate_attribute,
  span_overlap,
  empty_input,
  empty_sequence,
  degenerate_output,
  unknown_preset,
  unsupported_layer,
  shape_mismatch,
  divergence,
  io_failure,
  format_error,
  empty_join,
};

inline constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::length_exceeded: return "LengthExceeded";
    case Errc::contains_unknown: return "ContainsUnknown";
    case Errc::unbalanced_tag: return "UnbalancedTag";
    case Errc::illegal_nesting: return "IllegalNesting";
    case Errc::dangling_fragment: return "DanglingFragment";
    case Errc::duplicate_attribute: return "DuplicateAttribute";
    case Errc::span_overlap: return "SpanOverlap";
    case Errc::empty_input: return "EmptyInput";
    case Errc::empty_sequence: return "EmptySequence";
    case Errc::degenerate_output: return "DegenerateOutput";
    case Errc::unknown_preset: return "UnknownPreset";
    case Errc::unsupported_layer: return "UnsupportedLayer";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::divergence: return "Divergence";
    case Errc::io_failure: return "IoFailure";
    case Errc::format_error: return "FormatError";
    case Errc::empty_join: return "EmptyJoin";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tsrlab

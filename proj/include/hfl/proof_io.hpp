#pragma once

#include <stdexcept>
#include <string>

#include "hfl/kernel.hpp"

namespace hfl {

// Proof files are a sequence of S-expression forms; '#' starts a comment.
//   (vars "t:N, f:N->O")
//   (def name "formula")
//   (node id (label "★") (seq "Γ |- Δ") (rule Tag params...) (children id...))
//   (node id (seq "Γ |- Δ") (open))
//   (back leaf companion)
// Rule params: (at i) (rat j) (formula "φ") (hole x "T") (phi "φ") (psi "ψ") (chi "χ")
//   (ys y...) (map x "arg") (var x) (tmpl x y "Γ0 |- Δ0") (witness "ψ")
struct ProofParseError : std::runtime_error {
  size_t line;
  ProofParseError(const std::string& m, size_t l)
      : std::runtime_error("line " + std::to_string(l) + ": " + m), line(l) {}
};

PreProof parse_proof(const std::string& text);
// throws ProofParseError, or std::runtime_error when the file cannot be read
PreProof load_proof(const std::string& path);
std::string write_proof(const PreProof& pp);

// standard library definitions followed by the file's own
DefTable print_defs(const PreProof& pp);

}  // namespace hfl

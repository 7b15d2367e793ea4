#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hfl/kernel.hpp"

namespace hfl::gen {

// Random valid pre-proofs over propositional atoms a, b : O and a few higher-order
// fixpoint shapes. Rules are picked at random among the applicable ones; open leaves
// are closed by back-edges to any interior node with the same sequent.
struct Options {
  size_t max_nodes = 12;
  size_t formula_depth = 3;
  double back_prob = 0.85;
};

std::optional<PreProof> random_preproof(std::mt19937& rng, const Options& o = {});
// count distinct pre-proofs (by printed form); throws when the attempt budget runs out
std::vector<PreProof> random_corpus(uint32_t seed, size_t count, const Options& o = {});

}  // namespace hfl::gen

#pragma once

#include <string>
#include <vector>

#include "mixea/chain.hpp"

namespace mixea::detail {

// Canonical-form elitist chain from a mutation matrix indexed like `fitness`.
ElitistChain build_elitist(const DenseMatrix& mutation, std::vector<double> fitness, Domain domain, int n,
                           std::string label);

}  // namespace mixea::detail

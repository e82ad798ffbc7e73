#ifndef LOCSVM_LOCSVM_HPP
#define LOCSVM_LOCSVM_HPP

// Localized kernel learning: regionalize the input space, train one
// regularized kernel predictor per region under a (shifted) Lipschitz loss,
// and combine the local predictors with pointwise weights.

#include "locsvm/composer.hpp"
#include "locsvm/config.hpp"
#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/experiments.hpp"
#include "locsvm/kernel.hpp"
#include "locsvm/loss.hpp"
#include "locsvm/model_io.hpp"
#include "locsvm/numeric.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/risk.hpp"
#include "locsvm/robustness.hpp"
#include "locsvm/solver.hpp"

#endif  // LOCSVM_LOCSVM_HPP

#pragma once

#include "otfs/net.hpp"

namespace otfs::detail {

// Cost of one example; when grad_acc is non-null, accumulates the example's
// parameter gradient into it (same layout as theta).
double example_cost_grad(const NetworkParams& params, const InputTensor& x,
                         const CMat& h_true, double sigma2,
                         const Constellation& c, RVec* grad_acc);

InputTensor tensor_from_example(const TrainingSet::ExampleRef& ex,
                                const NetConfig& cfg);

}  // namespace otfs::detail

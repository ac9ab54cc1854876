#pragma once

#include <string>
#include <vector>

namespace abcmle {

// One optimizer update: iteration index for the batch driver, observation
// index for the online driver. Parameters are stored in their natural
// (constrained) coordinates; the gradient is the estimate that drove the
// update, in the optimizer's unconstrained coordinates.
struct RunStep {
  long index = 0;
  std::vector<double> theta;
  std::vector<double> gradient;
  // Full-pass log-likelihood estimate (batch) or the one-step predictive
  // log-likelihood increment (online). NaN when an injected score provider
  // bypassed likelihood evaluation.
  double log_likelihood = 0.0;
  double ess = 0.0;
  bool clipped = false;
  double seconds = 0.0;  // wall clock for the update; 0 unless timing was on
};

// Trace of one estimation run. `final_theta` is the tail average of the last
// `averaged` updates in natural coordinates — the reported estimate.
struct RunRecord {
  std::vector<double> initial_theta;
  std::vector<RunStep> steps;
  std::vector<double> final_theta;
  long averaged = 0;
  long updates = 0;     // total updates performed (>= steps.size() if thinned)
  long clip_events = 0;
  bool completed = true;
  std::string abort_reason;  // set when a numerical failure ended the run
};

}  // namespace abcmle

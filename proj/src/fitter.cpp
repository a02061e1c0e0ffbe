#include "s3bo/fitter.hpp"

#include "s3bo/errors.hpp"

#include <chrono>
#include <iostream>

namespace s3bo {

GpFitter::GpFitter(Box box, FitterOptions options) : box_(std::move(box)), options_(options) {
  if (options_.restarts < 1 || options_.full_train_every < 1 || options_.num_inducing < 1)
    throw InputError("fitter options must be positive");
}

GpHypers GpFitter::initial_guess(const Dataset& observed) const {
  const double sd = sample_std(observed.outputs());
  const double amp = options_.init_amplitude.value_or(sd > 0 ? sd : 1.0);
  const double ell = options_.init_lengthscale.value_or(0.25 * box_.width().maxCoeff());
  const Vector ells = Vector::Constant(box_.dim(), ell);
  return GpHypers{KernelSpec(options_.family, amp, ells), 1e-4 * amp * amp,
                  sample_mean(observed.outputs())};
}

void GpFitter::train(const Dataset& observed) {
  if (observed.empty()) throw ProtocolError("train: no observations");
  const Eigen::Index n = observed.size();
  GpHypers init = hypers_ ? *hypers_ : initial_guess(observed);
  init.mean = sample_mean(observed.outputs());

  const HyperBounds bounds = HyperBounds::from_data(observed.outputs(), box_.width().maxCoeff());
  TrainOptions topt;
  topt.restarts = (trainings_ % options_.full_train_every == 0) ? options_.restarts : 1;
  topt.seed = derive_seed(options_.seed, static_cast<std::uint64_t>(trainings_));

  if (sparse_for(n) && (!options_.freeze_inducing || inducing_.rows() == 0))
    inducing_ = sample_inducing(box_, options_.num_inducing, n,
                                derive_seed(options_.seed ^ 0x696e647563ULL,
                                            static_cast<std::uint64_t>(trainings_)));
  ++trainings_;
  try {
    const TrainResult r =
        sparse_for(n) ? train_sparse(observed, init, bounds, inducing_, options_.variant,
                                     options_.objective, topt)
                      : train_hypers_exact(observed, init, bounds, topt);
    hypers_ = r.hypers;
  } catch (const NumericalError& e) {
    // Keep the previous hyperparameters if there are any.
    if (!hypers_) throw;
    std::cerr << "warning: hyperparameter training failed, keeping previous values: " << e.what()
              << "\n";
    hypers_->mean = init.mean;
  }
}

std::unique_ptr<Surrogate> GpFitter::fit_with(const Dataset& data, const GpHypers& hypers) const {
  if (sparse_for(data.size())) {
    const Matrix& u = inducing_.rows() > 0
                          ? inducing_
                          : sample_inducing(box_, options_.num_inducing, data.size(), options_.seed);
    return std::make_unique<SparseGp>(
        SparseGp::fit(data.inputs(), data.outputs(), hypers, u, options_.variant, {false}));
  }
  return std::make_unique<ExactGp>(ExactGp::fit(data, hypers));
}

std::unique_ptr<Surrogate> GpFitter::fit(const Dataset& data) {
  if (!hypers_) throw ProtocolError("fit called before train");
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<Surrogate> model;
  try {
    model = fit_with(data, *hypers_);
  } catch (const NumericalError& e) {
    // One retry with a heavier noise floor before giving up.
    GpHypers heavier = *hypers_;
    const double amp2 = heavier.kernel.amplitude() * heavier.kernel.amplitude();
    heavier.noise_variance = std::max(heavier.noise_variance * 100.0, 1e-6 * amp2);
    std::cerr << "warning: refit failed, retrying with noise variance " << heavier.noise_variance
              << ": " << e.what() << "\n";
    model = fit_with(data, heavier);
  }
  stats_.fit_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  stats_.inducing_m = sparse_for(data.size()) ? inducing_.rows() : 0;
  return model;
}

}  // namespace s3bo

#pragma once

#include <chrono>
#include <cstddef>
#include <string>

#include "textdiar/jsonl.h"
#include "textdiar/predictor.h"

namespace textdiar {

struct RemoteOptions {
  // Retries after the first attempt for transport failures only; protocol
  // violations are never retried.
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds timeout{10000};
  std::size_t max_in_flight = 4;
};

// Client for the HTTP predictor protocol:
//   POST /v1/predict
//   {"id": str, "mode": "spm"|"mpm", "sentences": [str],
//    "boundary_offset": int|null}
//   -> 200 {"id": str, "probabilities": [number]}
// with one probability for spm and len(sentences)-1 for mpm.
class RemotePredictor final : public Predictor {
 public:
  // endpoint: "http://host:port" or "host:port".
  RemotePredictor(std::string endpoint, PredictorMode mode,
                  RemoteOptions options = {});

  PredictorKind kind() const override { return PredictorKind::kRemote; }
  PredictorMode mode() const override { return mode_; }
  double predict_spm(const Conversation& conv,
                     const SpmContext& ctx) const override;
  WindowPrediction predict_mpm(const Conversation& conv,
                               const MpmWindow& w) const override;
  std::vector<double> predict_spm_all(
      const Conversation& conv,
      std::span<const SpmContext> contexts) const override;
  std::vector<WindowPrediction> predict_mpm_all(
      const Conversation& conv, const WindowSet& windows) const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  // Sends one request with retry/backoff and returns the validated
  // probabilities.
  std::vector<double> call(const Json& request, std::size_t expected) const;

  std::string endpoint_;
  PredictorMode mode_;
  RemoteOptions options_;
};

Json make_spm_request(const std::string& id, const Conversation& conv,
                      const SpmContext& ctx);
Json make_mpm_request(const std::string& id, const Conversation& conv,
                      const MpmWindow& w);

// Validates a response body against a request; returns the probabilities.
std::vector<double> parse_predict_response(const std::string& body,
                                           const std::string& request_id,
                                           std::size_t expected);

}  // namespace textdiar

#include "textdiar/remote.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "textdiar/errors.h"

namespace textdiar {

namespace {

std::string strip_scheme(const std::string& endpoint) {
  const std::string prefix = "http://";
  if (endpoint.rfind(prefix, 0) == 0) return endpoint.substr(prefix.size());
  return endpoint;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first
// exception is rethrown after all workers stop.
template <typename Fn>
void bounded_parallel(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

RemotePredictor::RemotePredictor(std::string endpoint, PredictorMode mode,
                                 RemoteOptions options)
    : endpoint_(std::move(endpoint)), mode_(mode), options_(options) {
  if (strip_scheme(endpoint_).empty()) {
    throw_config("remote predictor endpoint is empty");
  }
  if (endpoint_.rfind("https://", 0) == 0) {
    throw_config("https endpoints are not supported: " + endpoint_);
  }
  if (mode_ == PredictorMode::kMultispeaker) {
    throw_config("the predictor protocol supports spm and mpm modes only");
  }
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

Json make_spm_request(const std::string& id, const Conversation& conv,
                      const SpmContext& ctx) {
  Json sentences = Json::array();
  for (std::size_t i = ctx.first; i <= ctx.last; ++i) {
    sentences.push_back(conv[i].text);
  }
  return Json{{"id", id},
              {"mode", "spm"},
              {"sentences", std::move(sentences)},
              {"boundary_offset", ctx.boundary_offset()}};
}

Json make_mpm_request(const std::string& id, const Conversation& conv,
                      const MpmWindow& w) {
  Json sentences = Json::array();
  for (std::size_t i = w.first; i <= w.last; ++i) {
    sentences.push_back(conv[i].text);
  }
  return Json{{"id", id},
              {"mode", "mpm"},
              {"sentences", std::move(sentences)},
              {"boundary_offset", nullptr}};
}

std::vector<double> parse_predict_response(const std::string& body,
                                           const std::string& request_id,
                                           std::size_t expected) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error&) {
    throw_protocol("request '" + request_id + "': response is not JSON");
  }
  if (!j.is_object()) {
    throw_protocol("request '" + request_id + "': response is not an object");
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>() != request_id) {
    throw_protocol("request '" + request_id + "': response id does not match");
  }
  auto probs = j.find("probabilities");
  if (probs == j.end() || !probs->is_array()) {
    throw_protocol("request '" + request_id +
                   "': response lacks 'probabilities' array");
  }
  std::vector<double> out;
  out.reserve(probs->size());
  for (const auto& v : *probs) {
    if (!v.is_number()) {
      throw_protocol("request '" + request_id + "': non-numeric probability");
    }
    out.push_back(v.get<double>());
  }
  validate_probabilities(out, expected, "request '" + request_id + "'");
  return out;
}

std::vector<double> RemotePredictor::call(const Json& request,
                                          std::size_t expected) const {
  const std::string id = request.at("id").get<std::string>();
  const std::string body = request.dump();
  httplib::Client client(strip_scheme(endpoint_));
  const auto secs = options_.timeout.count() / 1000;
  const auto usecs = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post("/v1/predict", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      throw_protocol("request '" + id + "' to " + endpoint_ +
                     ": HTTP status " + std::to_string(res->status));
    }
    return parse_predict_response(res->body, id, expected);
  }
  throw_transport("request '" + id + "' to " + endpoint_ + " failed after " +
                  std::to_string(options_.max_retries + 1) +
                  " attempts: " + last_error);
}

double RemotePredictor::predict_spm(const Conversation& conv,
                                    const SpmContext& ctx) const {
  if (mode_ != PredictorMode::kSpm) return Predictor::predict_spm(conv, ctx);
  const std::string id =
      conv.id() + "/spm/" + std::to_string(ctx.change_index);
  return call(make_spm_request(id, conv, ctx), 1).front();
}

WindowPrediction RemotePredictor::predict_mpm(const Conversation& conv,
                                              const MpmWindow& w) const {
  if (mode_ != PredictorMode::kMpm) return Predictor::predict_mpm(conv, w);
  const std::string id = conv.id() + "/mpm/" + std::to_string(w.index);
  return {w.index, call(make_mpm_request(id, conv, w), w.num_boundaries())};
}

std::vector<double> RemotePredictor::predict_spm_all(
    const Conversation& conv, std::span<const SpmContext> contexts) const {
  std::vector<double> out(contexts.size());
  bounded_parallel(contexts.size(), options_.max_in_flight,
                   [&](std::size_t i) { out[i] = predict_spm(conv, contexts[i]); });
  return out;
}

std::vector<WindowPrediction> RemotePredictor::predict_mpm_all(
    const Conversation& conv, const WindowSet& windows) const {
  std::vector<WindowPrediction> out(windows.size());
  bounded_parallel(windows.size(), options_.max_in_flight, [&](std::size_t j) {
    out[j] = predict_mpm(conv, windows[j]);
  });
  return out;
}

}  // namespace textdiar

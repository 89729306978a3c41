#pragma once

#include <string>

#include "animgram/caption.hpp"
#include "animgram/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace animgram {

/// Round trip through an HTTP service. Request: POST {"text", "pivot"} as
/// JSON to the endpoint. Response: JSON with the paraphrased "text".
class HttpParaphraser : public ParaphraseProvider {
 public:
  /// `endpoint` looks like "http://host:port/path".
  explicit HttpParaphraser(const std::string& endpoint, int timeout_s = 5) : timeout_s_(timeout_s) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw Error("paraphrase endpoint needs a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    base_ = endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
  }

  std::string id() const override { return "http"; }

  std::string round_trip(const std::string& text, const std::string& pivot) override {
    httplib::Client client(base_);
    client.set_connection_timeout(timeout_s_, 0);
    client.set_read_timeout(timeout_s_, 0);
    const nlohmann::json body{{"text", text}, {"pivot", pivot}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw Error("paraphrase request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw Error("paraphrase service answered " + std::to_string(res->status));
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
      throw Error("paraphrase reply has no text");
    return reply["text"].get<std::string>();
  }

 private:
  std::string base_;
  std::string path_;
  int timeout_s_;
};

}  // namespace animgram

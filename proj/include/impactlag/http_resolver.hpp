#pragma once

// Resolver backed by an HTTP service: GET <base>?term=<raw> answering
// {"record_id": "..."} or {"record_id": null}. Any transport failure or
// non-200 status is ResolverUnavailable, never "no match".

#include <optional>
#include <string>
#include <string_view>

#include <httplib.h>

#include "impactlag/error.hpp"
#include "impactlag/ingest.hpp"

namespace impactlag {

class HttpResolver final : public Resolver {
public:
  // base_url like "http://127.0.0.1:8080/resolve"
  explicit HttpResolver(const std::string& base_url, int timeout_s = 5) : timeout_s_(timeout_s) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigInvalid("resolver url needs a scheme: " + base_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base_url.compare(0, scheme_end, "http") != 0)
      throw ConfigInvalid("resolver url: only http is supported in this build: " + base_url);
#endif
    auto path_start = base_url.find('/', scheme_end + 3);
    host_ = base_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : base_url.substr(path_start);
  }

  std::optional<std::string> resolve(std::string_view raw) const override {
    httplib::Client cli(host_);
    cli.set_connection_timeout(timeout_s_);
    cli.set_read_timeout(timeout_s_);
    httplib::Params params{{"term", std::string(raw)}};
    auto res = cli.Get(path_, params, httplib::Headers{});
    if (!res) throw ResolverUnavailable("resolver " + host_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw ResolverUnavailable("resolver " + host_ + ": HTTP " + std::to_string(res->status));
    json body;
    try {
      body = json::parse(res->body);
    } catch (const json::exception& e) {
      throw ResolverUnavailable("resolver " + host_ + ": bad body: " + e.what());
    }
    auto it = body.find("record_id");
    if (it == body.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  }

private:
  std::string host_;
  std::string path_;
  int timeout_s_;
};

}  // namespace impactlag

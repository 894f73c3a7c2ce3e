#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "codirector/backends.hpp"
#include "codirector/errors.hpp"

namespace codirector {

namespace {
using nlohmann::json;

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL has no scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_json(const json& doc) {
    HttpBackendConfig config;
    config.backoff_initial_s = doc.value("backoff_initial_s", 0.5);
    config.backoff_factor = doc.value("backoff_factor", 2.0);
    if (!doc.contains("capabilities") || !doc.at("capabilities").is_object()) {
        throw ConfigError("backend config is missing the 'capabilities' object");
    }
    for (const auto& [name, entry] : doc.at("capabilities").items()) {
        CapabilityEndpoint ep;
        if (!entry.contains("endpoint")) {
            throw ConfigError("capability '" + name + "' has no endpoint");
        }
        ep.endpoint = entry.at("endpoint").get<std::string>();
        ep.model = entry.value("model", "");
        ep.timeout_s = entry.value("timeout_s", 120.0);
        ep.retries = entry.value("retries", 3);
        ep.max_in_flight = entry.value("max_in_flight", 4);
        ep.api_key_env = entry.value("api_key_env", "");
        if (ep.retries < 1) throw ConfigError("capability '" + name + "' retries must be >= 1");
        if (ep.max_in_flight < 1) {
            throw ConfigError("capability '" + name + "' max_in_flight must be >= 1");
        }
        config.capabilities[capability_from_name(name)] = ep;
    }
    return config;
}

HttpBackendConfig HttpBackendConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open backend config file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("backend config file is not valid JSON: " + path);
    return from_json(doc);
}

struct HttpBackend::Impl {
    HttpBackendConfig config;

    // Bounded in-flight requests per capability.
    struct Gate {
        std::mutex mutex;
        std::condition_variable cv;
        int in_flight = 0;
    };
    std::map<Capability, Gate> gates;

    explicit Impl(HttpBackendConfig cfg) : config(std::move(cfg)) {
        for (const auto& [cap, _] : config.capabilities) gates[cap];
    }

    CapabilityResponse invoke(const CapabilityRequest& request) {
        const auto it = config.capabilities.find(request.capability);
        if (it == config.capabilities.end()) {
            throw ConfigError("capability '" + capability_name(request.capability) +
                              "' is not configured");
        }
        const CapabilityEndpoint& ep = it->second;
        Gate& gate = gates.at(request.capability);
        {
            std::unique_lock lock(gate.mutex);
            gate.cv.wait(lock, [&] { return gate.in_flight < ep.max_in_flight; });
            ++gate.in_flight;
        }
        try {
            auto response = post_with_retries(request, ep);
            release(gate);
            return response;
        } catch (...) {
            release(gate);
            throw;
        }
    }

    static void release(Gate& gate) {
        {
            std::lock_guard lock(gate.mutex);
            --gate.in_flight;
        }
        gate.cv.notify_one();
    }

    CapabilityResponse post_with_retries(const CapabilityRequest& request,
                                         const CapabilityEndpoint& ep) {
        const auto [base, path] = split_url(ep.endpoint);
        json body = {{"model", ep.model},
                     {"prompt", request.prompt},
                     {"attachments", request.attachments},
                     {"params", request.params}};
        const std::string payload = body.dump();

        std::string last_error;
        double backoff = config.backoff_initial_s;
        for (int attempt = 1; attempt <= ep.retries; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
                backoff *= config.backoff_factor;
            }
            httplib::Client client(base);
            client.set_connection_timeout(std::chrono::duration<double>(ep.timeout_s));
            client.set_read_timeout(std::chrono::duration<double>(ep.timeout_s));
            if (!ep.api_key_env.empty()) {
                if (const char* key = std::getenv(ep.api_key_env.c_str())) {
                    client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
                }
            }
            auto result = client.Post(path, payload, "application/json");
            if (!result) {
                last_error = "connection failure: " + httplib::to_string(result.error());
                continue;
            }
            if (result->status >= 200 && result->status < 300) {
                // Structured endpoints answer {"text": ...}; anything else is
                // treated as a raw document.
                json doc = json::parse(result->body, nullptr, false);
                if (doc.is_object() && doc.contains("text") && doc.at("text").is_string()) {
                    return {doc.at("text").get<std::string>()};
                }
                return {result->body};
            }
            if (result->status >= 500) {
                last_error = "server error " + std::to_string(result->status) + ": " +
                             result->body.substr(0, 200);
                continue;
            }
            // 4xx is not retryable.
            throw TransportError("service rejected request with status " +
                                     std::to_string(result->status) + ": " +
                                     result->body.substr(0, 200),
                                 result->status);
        }
        throw TransportError("retry budget (" + std::to_string(ep.retries) +
                             ") exhausted for capability '" +
                             capability_name(request.capability) + "': " + last_error);
    }
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpBackend::~HttpBackend() = default;

CapabilityResponse HttpBackend::invoke(const CapabilityRequest& request) {
    return impl_->invoke(request);
}

}  // namespace codirector

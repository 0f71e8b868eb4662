#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "safepipe/driver/driver.hpp"

namespace safepipe::driver {

struct HttpResponse {
    int status = 200;
    std::string body; ///< JSON; always carries `version`
};

/// Request handling for the editor endpoints. Each request runs against an
/// immutable snapshot of the manifest's stubs and datasets; POST /reload
/// swaps in a new snapshot.
///
///   POST /check            {source}        -> {diagnostics, schemas, version}
///   POST /graph/from-text  {source[, pipeline]} -> graph document
///   POST /graph/to-text    {graph}         -> {source, diagnostics, version}
///   GET  /stubs                            -> {stubs, version}
///   POST /reload                           -> {stubs, version}
class Service {
public:
    explicit Service(Manifest manifest);

    /// Empty if the last (re)load succeeded.
    [[nodiscard]] std::string loadError() const;

    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

private:
    struct Snapshot;
    std::shared_ptr<const Snapshot> snapshot() const;
    std::string reload();

    Manifest manifest_;
    mutable std::mutex mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::string loadError_;
};

/// Loopback HTTP transport for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to `host:port`; port 0 picks a free port. Returns the bound
    /// port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool run();
    void stop();
    void waitUntilReady() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace safepipe::driver

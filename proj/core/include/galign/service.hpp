#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "galign/model.hpp"

namespace galign {

// JSON-over-HTTP front end for one model. The model is held as an immutable
// snapshot: PUT /model swaps it atomically, and every request works on the
// snapshot it started with.
class Service {
 public:
  struct Config {
    std::string bind = "127.0.0.1";
    int port = 7414;  // 0 picks a free port
    std::filesystem::path library;  // empty: LibraryStore::default_path()
  };

  explicit Service(std::optional<GoalGraph> model, Config config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Returns false if the port cannot be bound.
  bool start();
  // Binds and serves on the calling thread until stop().
  bool run();
  void stop();

  // Actual port once bound.
  int port() const;

  std::shared_ptr<const GoalGraph> snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace galign

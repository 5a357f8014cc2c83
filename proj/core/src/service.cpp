#include "galign/service.hpp"

#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "galign/advisor.hpp"
#include "galign/dsl.hpp"
#include "galign/error.hpp"
#include "galign/eval.hpp"
#include "galign/export.hpp"
#include "galign/json.hpp"
#include "galign/library.hpp"
#include "galign/scenario.hpp"

namespace galign {

namespace {

constexpr const char* kJson = "application/json";

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidModel: return 422;
    case ErrorCode::InvalidArgument:
    case ErrorCode::Unsupported: return 400;
    case ErrorCode::Io: return 500;
  }
  return 500;
}

Json error_body(const std::string& code, const std::string& message, const std::string& subject) {
  return {{"error", {{"code", code}, {"message", message}, {"subject", subject}}}};
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

GoalGraph empty_model() { return std::move(*build_graph(GraphParts{}).graph); }

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json parse_body(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

}  // namespace

struct Service::Impl {
  Config config;
  httplib::Server server;
  std::thread thread;
  int bound_port = 0;

  mutable std::mutex model_mutex;
  std::shared_ptr<const GoalGraph> model;

  std::mutex library_mutex;
  std::unique_ptr<LibraryStore> library;

  std::shared_ptr<const GoalGraph> current() const {
    std::lock_guard lock(model_mutex);
    return model;
  }

  void replace(GoalGraph graph) {
    auto next = std::make_shared<const GoalGraph>(std::move(graph));
    std::lock_guard lock(model_mutex);
    model = std::move(next);
  }

  bool bind() {
    if (config.port == 0) {
      bound_port = server.bind_to_any_port(config.bind);
      return bound_port > 0;
    }
    if (!server.bind_to_port(config.bind, config.port)) return false;
    bound_port = config.port;
    return true;
  }

  LibraryStore& store() {
    if (!library) {
      library = std::make_unique<LibraryStore>(config.library.empty() ? LibraryStore::default_path()
                                                                      : config.library);
    }
    return *library;
  }

  // Runs a handler, mapping the error idiom onto HTTP statuses.
  template <class Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_json(res, http_status(e.code()), error_body(to_string(e.code()), e.what(), e.subject()));
      } catch (const std::exception& e) {
        send_json(res, 500, error_body("internal", e.what(), ""));
      }
    };
  }

  void routes() {
    server.Get("/model", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, model_json(*current()));
    }));

    server.Get("/model.galign", guarded([this](const httplib::Request&, httplib::Response& res) {
      res.set_content(serialize_model(*current()), "text/plain; charset=utf-8");
    }));

    server.Put("/model", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto first = req.body.find_first_not_of(" \t\r\n");
      bool is_json = first != std::string::npos && req.body[first] == '{';
      if (is_json) {
        auto built = build_graph(model_from_json(parse_body(req)));
        if (!built.ok()) {
          Json body = error_body("invalid_model", "model failed validation", "");
          body["diagnostics"] = diagnostics_json(built.diagnostics);
          send_json(res, 422, body);
          return;
        }
        replace(std::move(*built.graph));
        send_json(res, 200, {{"diagnostics", diagnostics_json(built.diagnostics)}});
        return;
      }
      auto parsed = parse_model(req.body);
      if (!parsed.ok()) {
        Json body = error_body("invalid_model", "model failed validation", "");
        Json errors = Json::array();
        for (const auto& e : parsed.errors) {
          errors.push_back({{"line", e.span.line}, {"column", e.span.column}, {"message", e.message}});
        }
        body["parse_errors"] = errors;
        body["diagnostics"] = diagnostics_json(parsed.diagnostics);
        send_json(res, 422, body);
        return;
      }
      replace(std::move(*parsed.graph));
      send_json(res, 200, {{"diagnostics", diagnostics_json(parsed.diagnostics)}});
    }));

    server.Post("/evaluate", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto graph = current();
      EvalOptions options = options_from_json(parse_body(req));
      auto eval = evaluate(*graph, options);
      res.set_content(export_json_report(*graph, eval, validate(*graph)), kJson);
    }));

    server.Get("/attribution", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("from") || !req.has_param("to")) {
        throw Error(ErrorCode::InvalidArgument, "attribution needs from and to parameters");
      }
      auto graph = current();
      auto result = attribute(*graph, req.get_param_value("from"), req.get_param_value("to"));
      send_json(res, 200, attribution_json(*graph, result));
    }));

    server.Get("/prioritize", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto graph = current();
      std::optional<std::vector<std::string>> targets;
      if (req.has_param("objectives")) targets = split_ids(req.get_param_value("objectives"));
      send_json(res, 200, priorities_json(prioritize(*graph, targets)));
    }));

    server.Post("/whatif", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto graph = current();
      Json body = parse_body(req);
      if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "what-if body must be a JSON object");
      Scenario scenario = scenario_from_json(body);
      EvalOptions options = options_from_json(body.contains("options") ? body.at("options") : Json());
      send_json(res, 200, diff_json(run_whatif(*graph, scenario, options)));
    }));

    server.Get("/prompts", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, prompts_json(generate_prompts(*current())));
    }));

    server.Get("/export/dot", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto graph = current();
      bool with_eval = req.has_param("with_eval") && req.get_param_value("with_eval") == "true";
      std::string dot;
      if (with_eval) {
        auto eval = evaluate(*graph);
        dot = export_dot(*graph, &eval);
      } else {
        dot = export_dot(*graph);
      }
      res.set_content(dot, "text/vnd.graphviz");
    }));

    server.Get("/library", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(library_mutex);
      Json hits = Json::array();
      for (const auto& entry : store().query(req.has_param("q") ? req.get_param_value("q") : "")) {
        hits.push_back(library_entry_json(entry));
      }
      send_json(res, 200, {{"entries", hits}});
    }));

    server.Post("/library", guarded([this](const httplib::Request& req, httplib::Response& res) {
      LibraryEntry entry = library_entry_from_json(parse_body(req));
      std::lock_guard lock(library_mutex);
      store().add(entry);
      send_json(res, 201, library_entry_json(entry));
    }));
  }
};

Service::Service(std::optional<GoalGraph> model, Config config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->model = std::make_shared<const GoalGraph>(model ? std::move(*model) : empty_model());
  impl_->routes();
}

Service::~Service() { stop(); }

bool Service::start() {
  if (!impl_->bind()) return false;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

bool Service::run() {
  if (!impl_->bind()) return false;
  return impl_->server.listen_after_bind();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const { return impl_->bound_port; }

std::shared_ptr<const GoalGraph> Service::snapshot() const { return impl_->current(); }

}  // namespace galign

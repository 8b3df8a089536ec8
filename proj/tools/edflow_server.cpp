#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "edflow/service.hpp"

int main(int argc, char** argv) {
  using namespace edflow;
  CLI::App app{"HTTP JSON service for the ED flow simulator"};
  app.set_version_flag("--version", std::string(kVersion));

  service::ServerConfig cfg;
  bool openapi = false;
  app.add_flag("--openapi", openapi, "Print the OpenAPI document and exit");
  app.add_option("--static", cfg.static_dir, "Directory served at / (the built UI)");
  app.add_option("--preset-dir", cfg.preset_dir, "Directory holding <name>.json presets");
  CLI11_PARSE(app, argc, argv);

  if (openapi) {
    std::cout << service::openapi_yaml();
    return 0;
  }

  try {
    cfg = service::config_from_env(cfg);
    auto ctx = std::make_shared<const service::Context>(service::make_context(cfg.preset_dir));
    httplib::Server svr;
    service::mount(svr, ctx);
    if (!cfg.static_dir.empty() && !svr.set_mount_point("/", cfg.static_dir)) {
      std::cerr << "error: " << cfg.static_dir << ": not a directory\n";
      return 3;
    }
    std::fprintf(stderr, "edflow %s listening on %s:%d\n", kVersion, cfg.bind.c_str(), cfg.port);
    if (!svr.listen(cfg.bind, cfg.port)) {
      std::cerr << "error: cannot listen on " << cfg.bind << ":" << cfg.port << "\n";
      return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

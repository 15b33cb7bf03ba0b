#include "commands.hpp"

#include "ellip/error.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"ellipctl: elliptic operators, weights and L^p(w) estimates on periodic grids"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ELLIP_VERSION);
  ellipctl::register_commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ellip::Error& e) {
    std::cerr << "ellipctl: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ellipctl: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

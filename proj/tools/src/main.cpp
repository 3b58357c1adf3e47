#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pemfc/errors.hpp"

// Exit codes: 0 success, 2 validation, 3 I/O, 4 numerical failure.
int main(int argc, char** argv) {
  CLI::App app{"PEM fuel cell aging model and remaining-useful-life prediction"};
  app.require_subcommand(1);
  pemfc::cli::register_synth(app);
  pemfc::cli::register_predict(app);
  pemfc::cli::register_identify(app);
  pemfc::cli::register_fitlaws(app);
  pemfc::cli::register_detect(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const pemfc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pemfc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const pemfc::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

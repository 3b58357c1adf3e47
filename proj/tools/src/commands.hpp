#pragma once

namespace CLI {
class App;
}

namespace pemfc::cli {

void register_synth(CLI::App& app);
void register_predict(CLI::App& app);
void register_identify(CLI::App& app);
void register_fitlaws(CLI::App& app);
void register_detect(CLI::App& app);

}  // namespace pemfc::cli

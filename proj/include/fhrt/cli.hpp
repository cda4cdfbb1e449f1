#pragma once

namespace fhrt {

int cli_main(int argc, char** argv);

}  // namespace fhrt

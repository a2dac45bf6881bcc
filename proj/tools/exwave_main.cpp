// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#include "exwave/cli.hpp"

int main(int argc, char** argv) { return exwave::cli::main_entry(argc, argv); }

#!/usr/bin/env node
// Regenerates fixtures/layout/layout_oracle.json from the reference
// compiler's machine-readable storage layout output.
//
// Usage: node scripts/gen_layout_oracle.js
// Needs the solc npm module (0.5.16) resolvable via require(); point
// NODE_PATH at a directory containing node_modules/solc if necessary.

const fs = require("fs");
const path = require("path");
const solc = require("solc");

const layoutDir = path.join(__dirname, "..", "fixtures", "layout");
const outFile = path.join(layoutDir, "layout_oracle.json");

const sources = {};
for (const name of fs.readdirSync(layoutDir).sort()) {
  if (name.endsWith(".sol")) {
    sources[name] = { content: fs.readFileSync(path.join(layoutDir, name), "utf8") };
  }
}

const input = {
  language: "Solidity",
  sources,
  settings: {
    outputSelection: { "*": { "*": ["storageLayout"] } },
  },
};

const output = JSON.parse(solc.compile(JSON.stringify(input)));

const fatal = (output.errors || []).filter((e) => e.severity === "error");
if (fatal.length > 0) {
  for (const e of fatal) console.error(e.formattedMessage);
  process.exit(1);
}

const oracle = { compiler: solc.version(), files: {} };
for (const [file, contracts] of Object.entries(output.contracts)) {
  oracle.files[file] = {};
  for (const [name, artifact] of Object.entries(contracts)) {
    const layout = artifact.storageLayout;
    // Interfaces and empty contracts carry nothing worth comparing.
    if (!layout || !layout.storage || layout.storage.length === 0) continue;
    oracle.files[file][name] = layout.storage.map((v) => ({
      label: v.label,
      slot: Number(v.slot),
      offset: v.offset,
    }));
  }
}

fs.writeFileSync(outFile, JSON.stringify(oracle, null, 2) + "\n");
console.log(`wrote ${outFile}`);

import { backendFromConfigFile } from './backends.js';
import { serve } from './server.js';

// Usage: node dist/main.js [config.json]
// Without a config the null backend serves empty scenes, which is enough
// for protocol-level testing.
(async () => {
  let backend;
  try {
    backend = backendFromConfigFile(process.argv[2]);
  } catch (err) {
    // refuse to start before the handshake rather than serve a broken backend
    console.error(`adapter startup failed: ${(err as Error).message}`);
    process.exit(2);
  }
  await serve(process.stdin, process.stdout, backend);
})();

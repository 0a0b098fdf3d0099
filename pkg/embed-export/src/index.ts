export { encodeArchive, readArchive, writeArchive, MAGIC, VERSION } from './archive.js';
export { HashTextEncoder, HashVisionEncoder, loadTextEncoder, loadVisionEncoder } from './encoders.js';
export { runExport, requestableTexts, DEFAULT_JOB, type ExportJob } from './export.js';
export { normalizeText, textKey, visualCountKey, visualTokenKey } from './keys.js';
export { loadManifest, loadRegistry, parseManifest } from './manifest.js';
export { PREDEFINED_TAGS, labelTexts } from './taxonomy.js';

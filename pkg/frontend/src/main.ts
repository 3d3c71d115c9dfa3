// Browser wiring for the workbench. Logic lives in the pure modules; this
// file only moves data between the DOM and the Workbench state machine.

import { SegmentClient } from "./api.js";
import { Workbench } from "./workbench.js";

const SERVICE_URL = (window as { PROMPTSEG_URL?: string }).PROMPTSEG_URL ?? "http://127.0.0.1:8000";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function blobToImageData(blob: Blob): Promise<ImageData> {
  const bitmap = await createImageBitmap(blob);
  const canvas = document.createElement("canvas");
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(bitmap, 0, 0);
  return ctx.getImageData(0, 0, bitmap.width, bitmap.height);
}

/** Canvas-based mask encoder: binary mask -> 8-bit grayscale PNG blob. */
async function encodeMask(mask: Uint8Array, width: number, height: number): Promise<Blob> {
  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d")!;
  const pixels = ctx.createImageData(width, height);
  for (let i = 0; i < mask.length; i++) {
    const v = mask[i] ? 255 : 0;
    pixels.data[i * 4] = v;
    pixels.data[i * 4 + 1] = v;
    pixels.data[i * 4 + 2] = v;
    pixels.data[i * 4 + 3] = 255;
  }
  ctx.putImageData(pixels, 0, 0);
  return new Promise((resolve) => canvas.toBlob((b) => resolve(b!), "image/png"));
}

function main(): void {
  const client = new SegmentClient(SERVICE_URL);
  const wb = new Workbench({ client, encodeMask });

  const imageInput = el<HTMLInputElement>("image-input");
  const promptInput = el<HTMLInputElement>("prompt-input");
  const submitButton = el<HTMLButtonElement>("submit");
  const supportInput = el<HTMLInputElement>("support-input");
  const recipeSelect = el<HTMLSelectElement>("recipe-select");
  const brushSize = el<HTMLInputElement>("brush-size");
  const eraseToggle = el<HTMLInputElement>("erase-toggle");
  const clearMask = el<HTMLButtonElement>("clear-mask");
  const aSlider = el<HTMLInputElement>("a-slider");
  const aRow = el<HTMLDivElement>("a-row");
  const thresholdSlider = el<HTMLInputElement>("threshold-slider");
  const thresholdValue = el<HTMLSpanElement>("threshold-value");
  const opacitySlider = el<HTMLInputElement>("opacity-slider");
  const banner = el<HTMLDivElement>("banner");
  const fieldError = el<HTMLDivElement>("field-error");
  const historyList = el<HTMLUListElement>("history");
  const compareButton = el<HTMLButtonElement>("compare");
  const imageCanvas = el<HTMLCanvasElement>("image-canvas");
  const overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
  const supportCanvas = el<HTMLCanvasElement>("support-canvas");
  const compareLeft = el<HTMLCanvasElement>("compare-left");
  const compareRight = el<HTMLCanvasElement>("compare-right");

  client
    .recipes()
    .then((ids) => {
      recipeSelect.replaceChildren(
        ...ids.map((id) => {
          const option = document.createElement("option");
          option.value = id;
          option.textContent = id;
          if (id === "crop_bg_blur_intensity_10") option.selected = true;
          return option;
        }),
      );
    })
    .catch(() => {
      banner.textContent = "service unreachable: recipe list unavailable";
      banner.hidden = false;
    });

  imageInput.addEventListener("change", async () => {
    const file = imageInput.files?.[0];
    if (!file) return;
    wb.setImage(file);
    const data = await blobToImageData(file);
    imageCanvas.width = overlayCanvas.width = data.width;
    imageCanvas.height = overlayCanvas.height = data.height;
    imageCanvas.getContext("2d")!.putImageData(data, 0, 0);
    overlayCanvas.getContext("2d")!.clearRect(0, 0, data.width, data.height);
  });

  let supportData: ImageData | null = null;
  supportInput.addEventListener("change", async () => {
    const file = supportInput.files?.[0];
    if (!file) return;
    supportData = await blobToImageData(file);
    wb.setSupport(file, supportData.width, supportData.height);
    supportCanvas.width = supportData.width;
    supportCanvas.height = supportData.height;
    supportCanvas.getContext("2d")!.putImageData(supportData, 0, 0);
  });

  function redrawSupport(): void {
    if (!supportData || !wb.painter) return;
    const ctx = supportCanvas.getContext("2d")!;
    ctx.putImageData(supportData, 0, 0);
    const layer = ctx.getImageData(0, 0, supportData.width, supportData.height);
    for (let i = 0; i < wb.painter.mask.length; i++) {
      if (wb.painter.mask[i]) {
        layer.data[i * 4] = Math.round(0.5 * layer.data[i * 4] + 0.5 * 64);
        layer.data[i * 4 + 1] = Math.round(0.5 * layer.data[i * 4 + 1] + 0.5 * 200);
        layer.data[i * 4 + 2] = Math.round(0.5 * layer.data[i * 4 + 2] + 0.5 * 255);
      }
    }
    ctx.putImageData(layer, 0, 0);
  }

  let drawing = false;
  let last: [number, number] | null = null;
  function canvasPoint(event: MouseEvent): [number, number] {
    const rect = supportCanvas.getBoundingClientRect();
    // map display coordinates back to image pixels (canvas may be CSS-scaled)
    const x = ((event.clientX - rect.left) / rect.width) * supportCanvas.width;
    const y = ((event.clientY - rect.top) / rect.height) * supportCanvas.height;
    return [x, y];
  }
  supportCanvas.addEventListener("mousedown", (event) => {
    if (!wb.painter) return;
    drawing = true;
    last = canvasPoint(event);
    wb.painter.brush(last[0], last[1], Number(brushSize.value), eraseToggle.checked);
    redrawSupport();
  });
  supportCanvas.addEventListener("mousemove", (event) => {
    if (!drawing || !wb.painter || !last) return;
    const next = canvasPoint(event);
    wb.painter.stroke(last[0], last[1], next[0], next[1], Number(brushSize.value), eraseToggle.checked);
    last = next;
    redrawSupport();
  });
  window.addEventListener("mouseup", () => {
    drawing = false;
    last = null;
    render();
  });
  clearMask.addEventListener("click", () => {
    wb.painter?.clear();
    redrawSupport();
    render();
  });

  promptInput.addEventListener("input", () => {
    wb.prompt = promptInput.value;
    render();
  });
  recipeSelect.addEventListener("change", () => {
    wb.recipe = recipeSelect.value;
  });
  aSlider.addEventListener("input", () => {
    wb.a = Number(aSlider.value);
  });
  submitButton.addEventListener("click", () => void wb.submit());
  thresholdSlider.addEventListener("input", () => {
    wb.setThreshold(Number(thresholdSlider.value));
    thresholdValue.textContent = Number(thresholdSlider.value).toFixed(2);
  });
  opacitySlider.addEventListener("input", () => wb.setOpacity(Number(opacitySlider.value)));

  function drawView(canvas: HTMLCanvasElement, view: { width: number; height: number; maskBits: Uint8Array }): void {
    canvas.width = view.width;
    canvas.height = view.height;
    const ctx = canvas.getContext("2d")!;
    const img = ctx.createImageData(view.width, view.height);
    for (let i = 0; i < view.maskBits.length; i++) {
      const v = view.maskBits[i] ? 255 : 0;
      img.data[i * 4] = v;
      img.data[i * 4 + 1] = 0;
      img.data[i * 4 + 2] = 0;
      img.data[i * 4 + 3] = view.maskBits[i] ? 200 : 0;
    }
    ctx.putImageData(img, 0, 0);
  }

  compareButton.addEventListener("click", async () => {
    const checked = Array.from(historyList.querySelectorAll<HTMLInputElement>("input:checked"));
    if (checked.length !== 2) return;
    const [i, j] = checked.map((c) => Number(c.dataset.index));
    const { left, right } = await wb.compare(i, j);
    drawView(compareLeft, left);
    drawView(compareRight, right);
  });

  function render(): void {
    aRow.hidden = !wb.hasBothModalities;
    banner.hidden = wb.error?.kind !== "network";
    if (wb.error?.kind === "network") banner.textContent = `service unreachable: ${wb.error.message}`;
    fieldError.hidden = wb.error?.kind !== "field";
    if (wb.error?.kind === "field") fieldError.textContent = wb.error.message;
    submitButton.disabled = wb.busy || !wb.image;

    const overlay = wb.overlay();
    if (overlay && wb.result) {
      overlayCanvas.width = wb.result.width;
      overlayCanvas.height = wb.result.height;
      const ctx = overlayCanvas.getContext("2d")!;
      const layer = ctx.createImageData(wb.result.width, wb.result.height);
      layer.data.set(overlay);
      ctx.putImageData(layer, 0, 0);
    }

    historyList.replaceChildren(
      ...wb.history.list().map((entry, index) => {
        const item = document.createElement("li");
        const check = document.createElement("input");
        check.type = "checkbox";
        check.dataset.index = String(index);
        const button = document.createElement("button");
        button.textContent = `${entry.kind}: "${entry.prompt}" t=${entry.threshold}${entry.a !== null ? ` a=${entry.a}` : ""}`;
        button.addEventListener("click", () => void wb.rerun(index));
        item.append(check, button);
        return item;
      }),
    );
  }

  el<HTMLButtonElement>("retry").addEventListener("click", () => void wb.retry());
  wb.onChange(render);
  render();
}

main();

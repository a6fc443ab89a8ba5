/** three.js layer: primitives as wireframe plus translucent solid, each
 * trajectory as a line with per-waypoint speed markers (size = speed; hue is
 * reserved for agent identity). Rebuilt wholesale on every state change —
 * scenes here are tiny and the simplicity keeps render state derivable. */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import type { ObjectModel, PolylineModel, SceneModel } from "./sceneModel.js";

function primitiveGeometry(object: ObjectModel): THREE.BufferGeometry {
  const dims = object.dimensions as Record<string, number> & { half_extents?: number[] };
  switch (object.shape) {
    case "sphere":
      return new THREE.SphereGeometry(dims.radius, 24, 16);
    case "rect_plane":
      return new THREE.PlaneGeometry(2 * dims.half_width, 2 * dims.half_height);
    case "cylinder": {
      const g = new THREE.CylinderGeometry(dims.radius, dims.radius, 2 * dims.half_length, 24);
      g.rotateX(Math.PI / 2); // our axis is local Z
      return g;
    }
    case "cone": {
      const g = new THREE.ConeGeometry(dims.base_radius, dims.height, 24);
      g.rotateX(Math.PI / 2);
      g.translate(0, 0, dims.height / 2); // base disc at the local origin
      return g;
    }
    case "cuboid": {
      const he = dims.half_extents as number[];
      return new THREE.BoxGeometry(2 * he[0], 2 * he[1], 2 * he[2]);
    }
  }
}

function objectGroup(object: ObjectModel): THREE.Group {
  const group = new THREE.Group();
  const geometry = primitiveGeometry(object);
  const solid = new THREE.Mesh(
    geometry,
    new THREE.MeshLambertMaterial({
      color: 0x8899aa,
      transparent: true,
      opacity: 0.35,
      side: THREE.DoubleSide,
    }),
  );
  const wire = new THREE.LineSegments(
    new THREE.WireframeGeometry(geometry),
    new THREE.LineBasicMaterial({ color: 0x445566 }),
  );
  group.add(solid, wire);
  group.position.set(...object.position);
  group.quaternion.set(...object.quaternion);
  return group;
}

function polylineGroup(line: PolylineModel): THREE.Group {
  const group = new THREE.Group();
  const geometry = new THREE.BufferGeometry().setFromPoints(
    line.points.map(([x, y, z]) => new THREE.Vector3(x, y, z)),
  );
  const material = line.dashed
    ? new THREE.LineDashedMaterial({ color: line.color, dashSize: 0.03, gapSize: 0.02 })
    : new THREE.LineBasicMaterial({ color: line.color });
  const threeLine = new THREE.Line(geometry, material);
  if (line.dashed) threeLine.computeLineDistances();
  group.add(threeLine);

  // speed markers: instanced spheres scaled per waypoint
  const marker = new THREE.InstancedMesh(
    new THREE.SphereGeometry(1, 8, 6),
    new THREE.MeshBasicMaterial({ color: line.color }),
    line.points.length,
  );
  const m = new THREE.Matrix4();
  line.points.forEach(([x, y, z], i) => {
    const s = line.markerSizes[i];
    m.makeScale(s, s, s).setPosition(x, y, z);
    marker.setMatrixAt(i, m);
  });
  group.add(marker);
  return group;
}

export class Viewer {
  private readonly scene = new THREE.Scene();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly renderer: THREE.WebGLRenderer;
  private readonly controls: OrbitControls;
  private content = new THREE.Group();

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(50, 1, 0.01, 100);
    this.camera.position.set(2.2, -2.2, 1.6);
    this.camera.up.set(0, 0, 1);
    this.controls = new OrbitControls(this.camera, canvas);
    this.scene.background = new THREE.Color(0xf5f6f8);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.9));
    const sun = new THREE.DirectionalLight(0xffffff, 1.2);
    sun.position.set(3, -2, 4);
    this.scene.add(sun);
    this.scene.add(new THREE.AxesHelper(0.5));
    this.scene.add(this.content);

    const resize = () => {
      const parent = canvas.parentElement!;
      this.renderer.setSize(parent.clientWidth, parent.clientHeight, false);
      this.camera.aspect = parent.clientWidth / parent.clientHeight;
      this.camera.updateProjectionMatrix();
    };
    new ResizeObserver(resize).observe(canvas.parentElement!);
    resize();

    const loop = () => {
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
      requestAnimationFrame(loop);
    };
    loop();
  }

  setModel(model: SceneModel) {
    this.scene.remove(this.content);
    this.content = new THREE.Group();
    for (const object of model.objects) this.content.add(objectGroup(object));
    for (const line of model.polylines) this.content.add(polylineGroup(line));
    this.scene.add(this.content);
  }
}
